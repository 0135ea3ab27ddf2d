#include <cstdio>
#include <set>
#include <sstream>

#include "gss/milp.hpp"

namespace gss {

namespace {

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? std::string("X") : out;
}

std::string base36(std::size_t v) {
  static const char* digits = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::string s;
  do {
    s.insert(s.begin(), digits[v % 36]);
    v /= 36;
  } while (v);
  return s;
}

class NameTable {
 public:
  explicit NameTable(std::set<std::string> reserved) : used_(std::move(reserved)) {}

  std::string make(const std::string& original) {
    const std::string clean = sanitize(original);
    std::string cand = clean.substr(0, 8);
    for (std::size_t n = 1; used_.count(cand); ++n) {
      const std::string suffix = base36(n);
      cand = clean.substr(0, 8 - suffix.size()) + suffix;
    }
    used_.insert(cand);
    return cand;
  }

 private:
  std::set<std::string> used_;
};

// Shortest representation that fits the 12-character numeric fields.
std::string num(double v) {
  char buf[64];
  for (int prec = 12; prec >= 1; --prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::string(buf).size() <= 12) return buf;
  }
  return buf;
}

std::string field(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

// Fields start at columns 2, 5, 15, 25, 40 and 50.
std::string entry(const std::string& code, const std::string& name1, const std::string& name2,
                  const std::string& value1, const std::string& name3 = "", const std::string& value2 = "") {
  std::string line = " " + field(code, 2) + " " + field(name1, 8) + "  " + field(name2, 8) + "  ";
  line += value1.size() < 12 ? std::string(12 - value1.size(), ' ') + value1 : value1;
  if (!name3.empty()) {
    line += "   " + field(name3, 8) + "  ";
    line += value2.size() < 12 ? std::string(12 - value2.size(), ' ') + value2 : value2;
  }
  return line + "\n";
}

}  // namespace

MpsExport export_mps(const MilpModel& model, const std::string& model_name) {
  model.validate();
  MpsExport out;
  const auto& vars = model.variables();
  const auto& rows = model.constraints();

  NameTable col_names({});
  for (const auto& v : vars) out.column_names.push_back(col_names.make(v.name));
  NameTable row_names({"OBJ"});
  for (const auto& r : rows) out.row_names.push_back(row_names.make(r.name));

  // Column-major view of the constraint matrix.
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(vars.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& t : rows[r].terms) cols[t.var].emplace_back(r, t.coef);
  std::vector<double> obj(vars.size(), 0.0);
  for (const auto& t : model.objective().terms()) obj[t.var] += t.coef;

  std::ostringstream os;
  os << "NAME          " << model_name.substr(0, 8) << "\n";
  if (model.sense() == ObjSense::maximize) os << "OBJSENSE\n    MAX\n";
  os << "ROWS\n";
  os << " N  OBJ\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const char* s = rows[r].sense == RowSense::le ? "L" : rows[r].sense == RowSense::ge ? "G" : "E";
    os << " " << field(s, 2) << " " << out.row_names[r] << "\n";
  }

  os << "COLUMNS\n";
  bool in_int = false;
  std::size_t marker = 0;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const bool is_bin = vars[j].kind == VarKind::binary;
    if (is_bin != in_int) {
      const std::string mname = "MARKER" + base36(marker++);
      os << "    " << field(mname.substr(0, 8), 8) << "  'MARKER'                 "
         << (is_bin ? "'INTORG'" : "'INTEND'") << "\n";
      in_int = is_bin;
    }
    const std::string& cn = out.column_names[j];
    std::vector<std::pair<std::string, double>> ents;
    if (obj[j] != 0.0 || cols[j].empty()) ents.emplace_back("OBJ", obj[j]);
    for (const auto& [r, a] : cols[j]) ents.emplace_back(out.row_names[r], a);
    for (std::size_t e = 0; e < ents.size(); e += 2) {
      if (e + 1 < ents.size()) {
        os << entry("", cn, ents[e].first, num(ents[e].second), ents[e + 1].first, num(ents[e + 1].second));
      } else {
        os << entry("", cn, ents[e].first, num(ents[e].second));
      }
    }
  }
  if (in_int) {
    os << "    " << field(("MARKER" + base36(marker)).substr(0, 8), 8) << "  'MARKER'                 'INTEND'\n";
  }

  os << "RHS\n";
  const double oc = model.objective().constant();
  if (oc != 0.0) os << entry("", "RHS", "OBJ", num(-oc));
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].rhs != 0.0) os << entry("", "RHS", out.row_names[r], num(rows[r].rhs));

  os << "RANGES\n";
  os << "BOUNDS\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    const std::string& cn = out.column_names[j];
    if (v.kind == VarKind::binary && v.lower == 0.0 && v.upper == 1.0) {
      os << entry("BV", "BND", cn, "");
      continue;
    }
    const bool lo_inf = !std::isfinite(v.lower), hi_inf = !std::isfinite(v.upper);
    if (!lo_inf && !hi_inf && v.lower == v.upper) {
      os << entry("FX", "BND", cn, num(v.lower));
    } else if (lo_inf && hi_inf) {
      os << entry("FR", "BND", cn, "");
    } else {
      if (lo_inf) {
        os << entry("MI", "BND", cn, "");
      } else if (v.lower != 0.0 || v.kind == VarKind::binary) {
        os << entry("LO", "BND", cn, num(v.lower));
      }
      if (!hi_inf) os << entry("UP", "BND", cn, num(v.upper));
      else if (v.kind == VarKind::binary) os << entry("PL", "BND", cn, "");
    }
  }
  os << "ENDATA\n";
  out.mps = os.str();

  std::ostringstream nm;
  for (std::size_t j = 0; j < vars.size(); ++j) nm << out.column_names[j] << " " << vars[j].name << "\n";
  for (std::size_t r = 0; r < rows.size(); ++r) nm << out.row_names[r] << " " << rows[r].name << "\n";
  out.name_map = nm.str();
  return out;
}

}  // namespace gss
