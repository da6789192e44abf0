#include "qauth/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "qauth/errors.hpp"
#include "qauth/family.hpp"
#include "qauth/forgery.hpp"
#include "qauth/io.hpp"
#include "qauth/protocol.hpp"
#include "qauth/unitary_attack.hpp"

namespace qauth::cli {

namespace {

struct UsageError : Error {
  using Error::Error;
};

SpaceLayout parse_layout(const std::string& text, std::size_t max_dim) {
  std::vector<Index> dims;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size()) {
        throw std::invalid_argument(part);
      }
      dims.push_back(static_cast<Index>(v));
    } catch (const std::exception&) {
      throw UsageError("--layout expects m,t,v integers, got '" + text + "'");
    }
  }
  if (dims.size() != 3) {
    throw UsageError("--layout expects exactly three integers m,t,v");
  }
  return SpaceLayout(dims[0], dims[1], dims[2], max_dim);
}

std::string layout_summary(const SpaceLayout& l) {
  std::ostringstream os;
  os << "layout m=" << l.m_dim() << " t=" << l.t_dim() << " v=" << l.v_dim()
     << ": C=" << l.code_dim() << " D=" << l.complement_dim()
     << " E=" << l.total_dim();
  if (auto q = l.q()) {
    os << " q=" << *q;
  }
  if (auto p = l.p()) {
    os << " p=" << *p;
  }
  return os.str();
}

std::string sibling_path(const std::string& family_path, const std::string& suffix) {
  std::string stem = family_path;
  const std::string ext = ".json";
  if (stem.size() > ext.size() &&
      stem.compare(stem.size() - ext.size(), ext.size(), ext) == 0) {
    stem.resize(stem.size() - ext.size());
  }
  return stem + suffix;
}

const char* verdict(bool pass) { return pass ? "SECURE" : "INSECURE"; }

void print_report(std::ostream& out, const std::string& title,
                  const ConditionReport& report) {
  out << "== " << title << " ==\n";
  for (const Condition& c : report.conditions) {
    out << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name << ": "
        << c.witness_label << " = " << c.witness;
    if (!c.detail.empty()) {
      out << " (" << c.detail << ")";
    }
    out << "\n";
  }
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string layout;
  std::string kind = "generic";
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateArgs& a, const Tolerances& tol, std::ostream& out) {
  const SpaceLayout layout = parse_layout(a.layout, tol.max_dim);
  std::optional<CodingSet> cs;
  FamilyMetadata meta;
  meta.kind = a.kind;
  if (a.kind == "generic") {
    if (a.k < 1) {
      throw UsageError("--k must be >= 1");
    }
    cs.emplace(generate_generic_family(layout, a.k, a.seed));
    meta.seed = a.seed;
    meta.seed_schedule = "U(0)=I; U(k)=haar_unitary(E, seed+k)";
  } else if (a.kind == "orthogonal") {
    cs.emplace(generate_orthogonal_family(layout, a.k));
    meta.seed_schedule = "deterministic cyclic block shift";
  } else if (a.kind == "block-rotation") {
    cs.emplace(generate_block_rotation_family(layout, a.seed, tol));
    meta.seed = a.seed;
    meta.seed_schedule =
        "attempt a: base=derive_seed(seed,a); U(k) basis haar_unitary(C, "
        "derive_seed(base,2k)), angles from derive_seed(base,2k+1)";
  } else {
    throw UsageError("--kind must be generic, orthogonal or block-rotation");
  }
  write_text_file(a.out, format_family(*cs, meta));
  out << layout_summary(layout) << "\n";
  out << "wrote " << cs->size() << " unitaries (" << a.kind << ") to " << a.out
      << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string family;
  std::string mode = "all";
};

int cmd_validate(const ValidateArgs& a, const Tolerances& tol, std::ostream& out) {
  const FamilyFile file = parse_family(read_text_file(a.family), tol);
  const CodingSet& cs = file.family;
  out << layout_summary(cs.layout()) << ", K=" << cs.size() << "\n";

  const bool all = a.mode == "all";
  if (!all && a.mode != "equal" && a.mode != "unequal" && a.mode != "forgery") {
    throw UsageError("--mode must be equal, unequal, forgery or all");
  }
  bool any_fail = false;
  std::vector<std::string> tokens;

  auto run_mode = [&](const std::string& name, auto&& validator) {
    try {
      const ConditionReport report = validator();
      print_report(out, name + " conditions", report);
      tokens.push_back(name + ": " + verdict(report.pass()));
      any_fail = any_fail || !report.pass();
    } catch (const InsufficientFamilyError& e) {
      if (!all) {
        throw UsageError(e.what());
      }
      tokens.push_back(name + ": INAPPLICABLE (" + e.what() + ")");
    } catch (const DomainError& e) {
      if (!all) {
        throw UsageError(e.what());
      }
      tokens.push_back(name + ": INAPPLICABLE (" + e.what() + ")");
    } catch (const DegenerateFamilyError& e) {
      if (!all) {
        throw UsageError(e.what());
      }
      tokens.push_back(name + ": INAPPLICABLE (" + e.what() + ")");
    }
  };

  const SpaceLayout& layout = cs.layout();
  if (all && layout.code_dim() != layout.complement_dim()) {
    tokens.push_back("equal: INAPPLICABLE (C != D)");
  } else if (all || a.mode == "equal") {
    run_mode("equal", [&] { return validate_equal_dims(cs, tol); });
  }
  if (all || a.mode == "unequal") {
    run_mode("unequal", [&] { return validate_unequal_dims(cs, tol); });
  }
  if (all || a.mode == "forgery") {
    run_mode("forgery", [&] { return validate_forgery(cs, tol); });
  }
  if (all) {
    const CommutantReport rep = deterministic_attack_commutant(cs, tol);
    out << "== unitary attack ==\n  commutant dimension = " << rep.dimension
        << (rep.borderline ? " (borderline spectrum)" : "") << "\n";
    tokens.push_back(std::string("unitary: ") + verdict(rep.is_secure));
    any_fail = any_fail || !rep.is_secure;
  }
  for (const std::string& t : tokens) {
    out << t << "\n";
  }
  return any_fail ? kInsecure : kOk;
}

// ---------------------------------------------------------------------------

struct AttackArgs {
  std::string type;
  std::string family;
  std::string rho;
  std::string out;
  bool json = false;
};

int cmd_attack(const AttackArgs& a, const Tolerances& tol, std::ostream& out) {
  const FamilyFile file = parse_family(read_text_file(a.family), tol);
  const CodingSet& cs = file.family;
  const SpaceLayout& layout = cs.layout();
  std::optional<DensityOperator> rho;
  if (!a.rho.empty()) {
    rho.emplace(parse_matrix_file(read_text_file(a.rho)).matrix, tol.density);
  }
  nlohmann::ordered_json summary;
  summary["type"] = a.type;

  if (a.type == "unitary") {
    const CommutantReport rep = deterministic_attack_commutant(cs, tol);
    summary["commutant_dimension"] = rep.dimension;
    summary["borderline"] = rep.borderline;
    summary["sigma_max"] = rep.sigma_max;
    summary["smallest_kept"] = rep.smallest_kept;
    summary["largest_dropped"] = rep.largest_dropped;
    if (!rep.extracted_attack) {
      summary["attack"] = nullptr;
      if (a.json) {
        out << summary.dump(2) << "\n";
      } else {
        out << "commutant dimension: " << rep.dimension << "\n";
        out << "dimension 1, no deterministic attack\n";
      }
      return kOk;
    }
    const DensityOperator sent =
        rho ? *rho
            : embed_in_code_space(
                  layout, DensityOperator::maximally_mixed(layout.code_dim()));
    const double pu = p_unitary(cs, *rep.extracted_attack, sent, tol);
    const std::string path = a.out.empty() ? sibling_path(a.family, ".attack.json") : a.out;
    write_text_file(path, format_matrix_file("operator", *rep.extracted_attack));
    summary["attack"] = path;
    summary["harmful"] = rep.harmful.value_or(false);
    summary["p_unitary"] = pu;
    if (a.json) {
      out << summary.dump(2) << "\n";
    } else {
      out << "commutant dimension: " << rep.dimension << "\n";
      out << "non-scalar attack: yes (harmful: "
          << (rep.harmful.value_or(false) ? "yes" : "no") << ")\n";
      out << "P^u_e = " << std::setprecision(17) << pu << "\n";
      out << "attack written to " << path << "\n";
    }
    return kInsecure;
  }

  if (a.type == "forge") {
    const ForgeryReport rep = optimal_forgery(cs, tol);
    const std::string path =
        a.out.empty() ? sibling_path(a.family, ".forgery.json") : a.out;
    write_text_file(path, format_matrix_file("state", rep.optimal_state.matrix()));
    summary["optimal_p_forge"] = rep.optimal_p_forge;
    summary["perfect_forgery"] = rep.perfect_forgery_exists;
    summary["kernel_dimension"] = rep.kernel_basis.cols();
    summary["top_multiplicity"] = rep.top_multiplicity;
    summary["state"] = path;
    std::optional<double> supplied;
    if (rho) {
      supplied = p_forge(cs, *rho, tol);
      summary["p_forge_supplied"] = *supplied;
    }
    if (a.json) {
      out << summary.dump(2) << "\n";
    } else {
      out << "optimal P^f_e = " << std::setprecision(17) << rep.optimal_p_forge
          << "\n";
      out << "perfect forgery: " << (rep.perfect_forgery_exists ? "yes" : "no")
          << " (kernel dimension " << rep.kernel_basis.cols() << ")\n";
      out << "top eigenvalue multiplicity: " << rep.top_multiplicity << "\n";
      if (supplied) {
        out << "P^f_e of supplied state = " << *supplied << "\n";
      }
      out << "forged state written to " << path << "\n";
    }
    return rep.perfect_forgery_exists ? kInsecure : kOk;
  }
  throw UsageError("attack type must be unitary or forge");
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string family;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::string attack;
  std::string forge;
  bool exact = false;
};

int cmd_simulate(const SimulateArgs& a, const Tolerances& tol, std::ostream& out) {
  const FamilyFile file = parse_family(read_text_file(a.family), tol);
  const CodingSet& cs = file.family;
  const SpaceLayout& layout = cs.layout();
  const Index e = layout.total_dim();
  if (a.trials < 1) {
    throw UsageError("--trials must be >= 1");
  }
  std::optional<ComplexMatrix> attack;
  std::optional<DensityOperator> forged;
  if (!a.attack.empty()) {
    attack = parse_matrix_file(read_text_file(a.attack)).matrix;
    if (attack->rows() != e || attack->cols() != e || !is_unitary(*attack, tol.unitary)) {
      throw DomainError("--attack must hold an E x E unitary");
    }
  }
  if (!a.forge.empty()) {
    forged.emplace(parse_matrix_file(read_text_file(a.forge)).matrix, tol.density);
    if (forged->dim() != e) {
      throw DimensionError("--forge must hold a state on E");
    }
  }

  ComplexVector tag_vec = ComplexVector::Zero(layout.t_dim());
  tag_vec(0) = 1.0;
  const DensityOperator tag = DensityOperator::pure(tag_vec);

  std::size_t accepted = 0;
  double prob_sum = 0.0;
  double fidelity_sum = 0.0;
  double fidelity_weight = 0.0;
  for (std::size_t i = 0; i < a.trials; ++i) {
    std::mt19937_64 rng(derive_seed(a.seed, i));
    std::uniform_int_distribution<std::size_t> key(0, cs.size() - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const std::size_t k = key(rng);
    ComplexVector psi(layout.m_dim());
    for (Index j = 0; j < psi.size(); ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      psi(j) = Complex(re, im);
    }
    psi.normalize();
    const DensityOperator sent =
        encode(cs, tag_message(layout, DensityOperator::pure(psi), tag, tol), k);
    DensityOperator received = sent;
    if (attack) {
      received = DensityOperator(*attack * sent.matrix() * attack->adjoint());
    } else if (forged) {
      received = *forged;
    }
    const Verification v = verify(layout, decode(cs, received, k), tol);
    prob_sum += v.accept_prob;
    const double fidelity =
        v.recovered_plaintext
            ? (psi.adjoint() * v.recovered_plaintext->matrix() * psi)(0, 0).real()
            : 0.0;
    if (a.exact) {
      fidelity_sum += v.accept_prob * fidelity;
      fidelity_weight += v.accept_prob;
    } else if (coin(rng) < v.accept_prob) {
      ++accepted;
      fidelity_sum += fidelity;
      fidelity_weight += 1.0;
    }
  }

  const double n = static_cast<double>(a.trials);
  out << std::setprecision(10);
  out << "trials: " << a.trials << "\n";
  if (a.exact) {
    out << "acceptance probability (exact): " << prob_sum / n << "\n";
  } else {
    const double rate = static_cast<double>(accepted) / n;
    // Wilson score interval
    const double z = 1.959963984540054;
    const double denom = 1.0 + z * z / n;
    const double centre = (rate + z * z / (2 * n)) / denom;
    const double half =
        z * std::sqrt(rate * (1 - rate) / n + z * z / (4 * n * n)) / denom;
    out << "accepted: " << accepted << "\n";
    out << "acceptance rate: " << rate << "\n";
    out << "95% interval: [" << std::max(0.0, centre - half) << ", "
        << std::min(1.0, centre + half) << "]\n";
    out << "mean acceptance probability: " << prob_sum / n << "\n";
  }
  if (fidelity_weight > 0.0) {
    out << "mean fidelity on acceptance: " << fidelity_sum / fidelity_weight << "\n";
  } else {
    out << "mean fidelity on acceptance: n/a\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string layout;
  std::size_t k = 2;
  std::size_t steps = 11;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_sweep(const SweepArgs& a, const Tolerances& tol, std::ostream& out,
              std::ostream& err) {
  const SpaceLayout layout = parse_layout(a.layout, tol.max_dim);
  std::vector<SweepPoint> points;
  try {
    points = sweep_overlap(layout, a.k, a.steps, a.seed, tol);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const auto violations = sweep_endpoint_violations(points, a.k);
  if (!violations.empty()) {
    for (const std::string& v : violations) {
      err << "sweep invariant violated: " << v << "\n";
    }
    return kInsecure;
  }
  write_text_file(a.out, format_sweep_csv(points));
  out << layout_summary(layout) << "\n";
  out << "wrote " << points.size() << " sweep points to " << a.out << "\n";
  return kOk;
}

std::optional<std::uint64_t> env_u64(const char* name) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') {
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(raw, &used);
    if (raw[used] != '\0') {
      throw std::invalid_argument(raw);
    }
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string(name) + " must be a non-negative integer");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Quantum message authentication with unitary coding sets"};
  app.name("qauth");
  app.require_subcommand(1);
  double tol_override = 0.0;
  app.add_option("--tol", tol_override,
                 "relative rank/nullspace threshold (default 1e-10)")
      ->check(CLI::PositiveNumber);

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "write a coding family file");
  gen_cmd->add_option("--layout", gen.layout, "m,t,v")->required();
  gen_cmd->add_option("--kind", gen.kind, "generic|orthogonal|block-rotation")
      ->check(CLI::IsMember({"generic", "orthogonal", "block-rotation"}));
  gen_cmd->add_option("--k", gen.k, "family size K (block-rotation uses q+1)");
  gen_cmd->add_option("--seed", gen.seed, "base seed");
  gen_cmd->add_option("--out", gen.out, "output path")->required();

  ValidateArgs val;
  auto* val_cmd = app.add_subcommand("validate", "check the security conditions");
  val_cmd->add_option("family", val.family, "family file")->required();
  val_cmd->add_option("--mode", val.mode, "equal|unequal|forgery|all")
      ->check(CLI::IsMember({"equal", "unequal", "forgery", "all"}));

  AttackArgs att;
  auto* att_cmd = app.add_subcommand("attack", "analyze the unitary or forgery attack");
  att_cmd->add_option("type", att.type, "unitary|forge")
      ->required()
      ->check(CLI::IsMember({"unitary", "forge"}));
  att_cmd->add_option("family", att.family, "family file")->required();
  att_cmd->add_option("--rho", att.rho, "state file");
  att_cmd->add_option("--out", att.out, "where to write the attack or forged state");
  att_cmd->add_flag("--json", att.json, "machine-readable summary");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo run of the protocol");
  sim_cmd->add_option("family", sim.family, "family file")->required();
  sim_cmd->add_option("--trials", sim.trials, "number of trials");
  sim_cmd->add_option("--seed", sim.seed, "base seed");
  auto* sim_attack = sim_cmd->add_option("--attack", sim.attack, "unitary attack file");
  auto* sim_forge = sim_cmd->add_option("--forge", sim.forge, "forged state file");
  sim_attack->excludes(sim_forge);
  sim_cmd->add_flag("--exact", sim.exact, "average exact acceptance probabilities");

  SweepArgs swp;
  auto* swp_cmd = app.add_subcommand("sweep", "overlap sweep from coincident to orthogonal");
  swp_cmd->add_option("--layout", swp.layout, "m,t,v")->required();
  swp_cmd->add_option("--k", swp.k, "family size K");
  swp_cmd->add_option("--steps", swp.steps, "grid points in [0, 1]");
  swp_cmd->add_option("--seed", swp.seed, "base seed");
  swp_cmd->add_option("--out", swp.out, "CSV output path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "qauth: " << e.what() << "\n";
    return kUsage;
  }

  try {
    Tolerances tol;
    if (tol_override > 0.0) {
      tol.rank_rel = tol_override;
    }
    if (auto cap = env_u64("QAUTH_MAX_DIM")) {
      tol.max_dim = static_cast<std::size_t>(*cap);
    }
    if (auto seed = env_u64("QAUTH_SEED")) {
      gen.seed = *seed;
      sim.seed = *seed;
      swp.seed = *seed;
    }
    if (gen_cmd->parsed()) {
      return cmd_generate(gen, tol, out);
    }
    if (val_cmd->parsed()) {
      return cmd_validate(val, tol, out);
    }
    if (att_cmd->parsed()) {
      return cmd_attack(att, tol, out);
    }
    if (sim_cmd->parsed()) {
      return cmd_simulate(sim, tol, out);
    }
    if (swp_cmd->parsed()) {
      return cmd_sweep(swp, tol, out, err);
    }
  } catch (const InternalConsistencyError& e) {
    err << "qauth: internal error: " << e.what() << "\n";
    return kInsecure;
  } catch (const std::exception& e) {
    err << "qauth: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace qauth::cli
