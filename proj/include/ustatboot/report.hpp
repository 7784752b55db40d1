#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ustatboot {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Minimal JSON tree with insertion-ordered object keys and doubles printed
/// with 17 significant digits, so emitted numbers round-trip bit-exactly and
/// equal inputs always serialize to equal bytes.
class Json {
public:
  Json() : kind_(Kind::Null) {}
  Json(bool b) : kind_(Kind::Bool), bool_(b) {}
  Json(double v) : kind_(Kind::Double), num_(v) {}
  Json(std::int64_t v) : kind_(Kind::Int), int_(v) {}
  Json(std::uint64_t v) : kind_(Kind::Uint), uint_(v) {}
  Json(int v) : Json(static_cast<std::int64_t>(v)) {}
  Json(const char* s) : kind_(Kind::String), str_(s) {}
  Json(std::string s) : kind_(Kind::String), str_(std::move(s)) {}

  static Json object();
  static Json array();
  static Json array_of(const std::vector<double>& values);

  Json& set(const std::string& key, Json value);  // objects only
  Json& push(Json value);                         // arrays only

  std::string dump(int indent = -1) const;

private:
  enum class Kind { Null, Bool, Int, Uint, Double, String, Array, Object };

  void dump_to(std::string& out, int indent, int depth) const;

  Kind kind_;
  bool bool_ = false;
  std::int64_t int_ = 0;
  std::uint64_t uint_ = 0;
  double num_ = 0.0;
  std::string str_;
  std::vector<Json> items_;
  std::vector<std::pair<std::string, Json>> members_;
};

/// 17-significant-digit decimal form of a double (round-trip exact).
std::string format_double(double v);

/// FNV-1a 64-bit content hash.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t hash_file(const std::string& path);

/// Provenance record written next to every command's outputs.
struct RunManifest {
  std::string command;
  Json parameters = Json::object();
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::uint64_t>> input_digests;
  std::string created_utc;  // filled by now_utc() at write time
};

std::string now_utc();
Json manifest_json(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace ustatboot
