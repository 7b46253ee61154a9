#include "aopsic/basis_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aopsic/error.hpp"

namespace aopsic {

using nlohmann::json;

namespace {

const char* family_name(BasisFamily f) { return f == BasisFamily::OddOnly ? "odd" : "extended"; }

json basis_doc(const OrthonormalBasis& basis) {
  json doc;
  doc["family"] = family_name(basis.family);
  doc["P"] = basis.max_order;
  doc["effective_rank"] = basis.effective_rank;
  doc["coeffs"] = basis.coeffs;
  doc["moments"] = std::vector<double>(basis.moments.values().begin(), basis.moments.values().end());
  return doc;
}

OrthonormalBasis basis_from_doc(const json& doc) {
  try {
    const auto family_str = doc.at("family").get<std::string>();
    BasisFamily family;
    if (family_str == "odd") {
      family = BasisFamily::OddOnly;
    } else if (family_str == "extended") {
      family = BasisFamily::Extended;
    } else {
      throw Error(ErrorCode::ConfigError, "basis: unknown family '" + family_str + "'");
    }
    OrthonormalBasis b;
    b.family = family;
    b.max_order = doc.at("P").get<int>();
    b.effective_rank = doc.at("effective_rank").get<int>();
    b.coeffs = doc.at("coeffs").get<std::vector<std::vector<double>>>();
    const auto kind = family == BasisFamily::OddOnly ? MomentKind::EvenOnly : MomentKind::AllOrders;
    b.moments = MomentVector(kind, doc.at("moments").get<std::vector<double>>());
    if (b.effective_rank > b.requested_rank()) {
      throw Error(ErrorCode::ConfigError, "basis: effective_rank exceeds what P allows");
    }
    for (const auto& c : b.coeffs) {
      const double lead = c.empty() ? 0.0 : c.back();
      b.norm_sq.push_back(lead != 0.0 ? 1.0 / (lead * lead) : 0.0);
      std::vector<double> m(c);
      for (auto& v : m) v /= lead;
      b.monic.push_back(std::move(m));
    }
    validate_basis(b);
    return b;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("basis document: ") + e.what());
  }
}

}  // namespace

std::string basis_to_json(const OrthonormalBasis& basis, int indent) {
  return basis_doc(basis).dump(indent);
}

OrthonormalBasis basis_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("basis document: ") + e.what());
  }
  return basis_from_doc(doc);
}

std::string lut_to_json(const McsLut& lut, int indent) {
  json doc = json::object();
  for (const auto& [id, basis] : lut) doc[id] = basis_doc(basis);
  return doc.dump(indent);
}

McsLut lut_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("LUT document: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "LUT document: expected an object");
  McsLut lut;
  for (const auto& [id, entry] : doc.items()) {
    try {
      lut.emplace(id, basis_from_doc(entry));
    } catch (const Error& e) {
      throw Error(e.code(), "LUT entry '" + id + "': " + e.what());
    }
  }
  return lut;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace aopsic
