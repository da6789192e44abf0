#include "qauth/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qauth/errors.hpp"

namespace qauth {

namespace {

using nlohmann::json;

std::string format_number(double x) {
  if (x == 0.0) {
    return "0";  // folds -0 so that a reparse prints the same bytes
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quote(const std::string& s) { return json(s).dump(); }

void format_matrix(std::ostringstream& os, const ComplexMatrix& m,
                   const std::string& indent) {
  os << "[\n";
  for (Index r = 0; r < m.rows(); ++r) {
    os << indent << "  [";
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) {
        os << ", ";
      }
      os << "[" << format_number(m(r, c).real()) << ", "
         << format_number(m(r, c).imag()) << "]";
    }
    os << "]" << (r + 1 < m.rows() ? "," : "") << "\n";
  }
  os << indent << "]";
}

ComplexMatrix decode_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw DomainError(what + ": expected a non-empty array of rows");
  }
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j.front().is_array() ? j.front().size() : 0);
  if (cols == 0) {
    throw DomainError(what + ": rows must be non-empty arrays");
  }
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw DimensionError(what + ": ragged matrix rows");
    }
    for (Index c = 0; c < cols; ++c) {
      const json& entry = row[static_cast<std::size_t>(c)];
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
          !entry[1].is_number()) {
        throw DomainError(what + ": entries must be [real, imaginary] pairs");
      }
      m(r, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  if (!m.allFinite()) {
    throw DomainError(what + ": non-finite entries");
  }
  return m;
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string(what) + ": malformed JSON: " + e.what());
  }
}

Index get_dim(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    throw DomainError(std::string("family file: layout.") + key +
                      " must be an integer");
  }
  return obj[key].get<Index>();
}

}  // namespace

FamilyFile parse_family(const std::string& text, const Tolerances& tol) {
  const json doc = parse_json(text, "family file");
  if (!doc.is_object() || !doc.contains("layout") || !doc.contains("unitaries")) {
    throw DomainError("family file: missing layout or unitaries");
  }
  const json& lay = doc["layout"];
  if (!lay.is_object()) {
    throw DomainError("family file: layout must be an object");
  }
  SpaceLayout layout(get_dim(lay, "m"), get_dim(lay, "t"), get_dim(lay, "v"),
                     tol.max_dim);
  const json& us = doc["unitaries"];
  if (!us.is_array()) {
    throw DomainError("family file: unitaries must be an array");
  }
  std::vector<ComplexMatrix> mats;
  for (std::size_t k = 0; k < us.size(); ++k) {
    mats.push_back(decode_matrix(us[k], "family file: U(" + std::to_string(k) + ")"));
  }
  FamilyMetadata meta;
  if (doc.contains("metadata") && doc["metadata"].is_object()) {
    const json& md = doc["metadata"];
    meta.kind = md.value("kind", "");
    if (md.contains("seed") && md["seed"].is_number_unsigned()) {
      meta.seed = md["seed"].get<std::uint64_t>();
    } else if (md.contains("seed") && md["seed"].is_number_integer()) {
      meta.seed = static_cast<std::uint64_t>(md["seed"].get<std::int64_t>());
    }
    meta.seed_schedule = md.value("seed_schedule", "");
    meta.tool_version = md.value("tool_version", "");
  }
  return FamilyFile{CodingSet(layout, std::move(mats), tol.unitary), meta};
}

std::string format_family(const CodingSet& family, const FamilyMetadata& meta) {
  const SpaceLayout& l = family.layout();
  std::ostringstream os;
  os << "{\n";
  os << "  \"layout\": {\"m\": " << l.m_dim() << ", \"t\": " << l.t_dim()
     << ", \"v\": " << l.v_dim() << "},\n";
  os << "  \"unitaries\": [\n";
  for (std::size_t k = 0; k < family.size(); ++k) {
    os << "    ";
    format_matrix(os, family.unitary(k), "    ");
    os << (k + 1 < family.size() ? "," : "") << "\n";
  }
  os << "  ],\n";
  os << "  \"metadata\": {\"kind\": " << quote(meta.kind) << ", \"seed\": ";
  if (meta.seed) {
    os << *meta.seed;
  } else {
    os << "null";
  }
  os << ", \"seed_schedule\": " << quote(meta.seed_schedule)
     << ", \"tool_version\": " << quote(meta.tool_version) << "}\n";
  os << "}\n";
  return os.str();
}

MatrixFile parse_matrix_file(const std::string& text) {
  const json doc = parse_json(text, "matrix file");
  if (!doc.is_object() || !doc.contains("matrix")) {
    throw DomainError("matrix file: missing matrix");
  }
  MatrixFile out{doc.value("kind", ""), decode_matrix(doc["matrix"], "matrix file")};
  if (doc.contains("dim") && doc["dim"].is_number_integer() &&
      doc["dim"].get<Index>() != out.matrix.rows()) {
    throw DimensionError("matrix file: dim does not match the matrix");
  }
  return out;
}

std::string format_matrix_file(const std::string& kind, const ComplexMatrix& m) {
  std::ostringstream os;
  os << "{\n  \"kind\": " << quote(kind) << ",\n  \"dim\": " << m.rows()
     << ",\n  \"matrix\": ";
  format_matrix(os, m, "  ");
  os << "\n}\n";
  return os.str();
}

std::string format_sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os << "s,overlap,optimal_p_forge,commutant_dimension,p_unitary_block_bound\n";
  for (const SweepPoint& p : points) {
    os << format_number(p.s) << "," << format_number(p.overlap) << ","
       << format_number(p.optimal_p_forge) << "," << p.commutant_dimension
       << ",";
    if (p.p_unitary_block_bound) {
      os << format_number(*p.p_unitary_block_bound);
    }
    os << "\n";
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path + " for reading");
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot open " + path + " for writing");
  }
  out << text;
  if (!out) {
    throw Error("failed writing " + path);
  }
}

}  // namespace qauth
