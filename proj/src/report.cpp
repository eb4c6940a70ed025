#include "ofsym/report.hpp"

#include <cstdio>
#include <fstream>

namespace ofsym {

Json Json::str(std::string s) {
  Json j(Tag::String);
  j.string_ = std::move(s);
  return j;
}

Json Json::num(double v) {
  Json j(Tag::Number);
  j.number_ = v;
  return j;
}

Json Json::integer(long long v) {
  Json j(Tag::Integer);
  j.int_ = v;
  return j;
}

Json Json::boolean(bool b) {
  Json j(Tag::Bool);
  j.bool_ = b;
  return j;
}

Json& Json::set(const std::string& key, Json v) {
  members_.insert_or_assign(key, std::move(v));
  return *this;
}

Json& Json::push(Json v) {
  items_.push_back(std::move(v));
  return *this;
}

namespace {

void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

}  // namespace

void Json::write(std::string& out, int indent, int depth) const {
  const std::string pad(indent * depth, ' ');
  const std::string pad_in(indent * (depth + 1), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (tag_) {
    case Tag::Object: {
      if (members_.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (const auto& [k, v] : members_) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad_in;
        escape_into(out, k);
        out += indent > 0 ? ": " : ":";
        v.write(out, indent, depth + 1);
      }
      out += nl;
      out += pad;
      out += "}";
      break;
    }
    case Tag::Array: {
      if (items_.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      bool first = true;
      for (const auto& v : items_) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad_in;
        v.write(out, indent, depth + 1);
      }
      out += nl;
      out += pad;
      out += "]";
      break;
    }
    case Tag::String: escape_into(out, string_); break;
    case Tag::Number: out += format_double(number_); break;
    case Tag::Integer: out += std::to_string(int_); break;
    case Tag::Bool: out += bool_ ? "true" : "false"; break;
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  write(out, indent, 0);
  out += "\n";
  return out;
}

Json to_json(const ResidualReport& rep) {
  Json j = Json::object();
  j.set("max_residual", Json::num(rep.max_abs));
  j.set("l2_mean_residual", Json::num(rep.l2_mean));
  j.set("t_at_max", Json::num(rep.t_at_max));
  j.set("x_at_max", Json::num(rep.x_at_max));
  j.set("interior_points", Json::integer(rep.interior_points));
  return j;
}

Json to_json(const SymmetryField& field) {
  Json j = Json::object();
  j.set("label", Json::str(field.label));
  j.set("expression", Json::str(field.printable()));
  j.set("m", Json::num(field.m));
  j.set("c", Json::num(field.c));
  j.set("verified", Json::boolean(field.verified));
  Json res = Json::object();
  res.set("drift_condition", Json::num(field.drift_condition_residual));
  res.set("evolution_condition", Json::num(field.evolution_condition_residual));
  res.set("time_consistency", Json::num(field.time_consistency_residual));
  j.set("residuals", std::move(res));
  return j;
}

Json to_json(const ClassificationReport& rep) {
  Json j = Json::object();
  j.set("case", Json::str(rep.case_label));
  Json counts = Json::object();
  counts.set("extra", Json::integer(rep.extra_count));
  counts.set("with_autonomy", Json::integer(rep.with_autonomy));
  counts.set("total", Json::str(rep.total));
  j.set("counts", std::move(counts));
  Json constants = Json::object();
  if (rep.m) constants.set("m", Json::num(*rep.m));
  if (rep.c) constants.set("c", Json::num(*rep.c));
  j.set("constants", std::move(constants));
  Json conds = Json::array();
  for (const auto& d : rep.diagnostics) {
    Json row = Json::object();
    row.set("name", Json::str(d.name));
    row.set("max_residual", Json::num(d.residual));
    row.set("holds", Json::boolean(d.holds));
    conds.push(std::move(row));
  }
  j.set("conditions", std::move(conds));
  Json fields = Json::array();
  for (const auto& f : rep.fields) fields.push(to_json(f));
  j.set("symmetries", std::move(fields));
  Json cands = Json::array();
  for (const auto& f : rep.candidates) cands.push(to_json(f));
  j.set("unverified_candidates", std::move(cands));
  Json notes = Json::array();
  for (const auto& n : rep.notes) notes.push(Json::str(n));
  j.set("notes", std::move(notes));
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

void write_csv(const std::string& path, const std::string& comment,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  if (!comment.empty()) out << "# " << comment << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

}  // namespace ofsym
