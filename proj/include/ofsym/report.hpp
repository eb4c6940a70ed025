#pragma once

#include <map>
#include <string>
#include <vector>

#include "ofsym/classify.hpp"
#include "ofsym/pdesolve.hpp"

namespace ofsym {

// Minimal JSON value with deterministic serialization: object keys sorted,
// every floating-point number printed with 17 significant digits.
class Json {
 public:
  static Json object() { return Json(Tag::Object); }
  static Json array() { return Json(Tag::Array); }
  static Json str(std::string s);
  static Json num(double v);
  static Json integer(long long v);
  static Json boolean(bool b);

  Json& set(const std::string& key, Json v);
  Json& push(Json v);
  std::string dump(int indent = 0) const;

 private:
  enum class Tag { Object, Array, String, Number, Integer, Bool };
  explicit Json(Tag t) : tag_(t) {}
  Tag tag_;
  std::map<std::string, Json> members_;
  std::vector<Json> items_;
  std::string string_;
  double number_ = 0;
  long long int_ = 0;
  bool bool_ = false;

  void write(std::string& out, int indent, int depth) const;
};

Json to_json(const ResidualReport& rep);
Json to_json(const SymmetryField& field);
Json to_json(const ClassificationReport& rep);

void write_text_file(const std::string& path, const std::string& content);

// CSV with an optional leading comment line; all numbers at 17 significant
// digits.
void write_csv(const std::string& path, const std::string& comment,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

}  // namespace ofsym
