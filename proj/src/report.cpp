#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dwc/suite.hpp"

namespace dwc {

namespace {

using ojson = nlohmann::ordered_json;

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

}  // namespace

ojson report_to_json(const Report& report, bool include_timing) {
  ojson j;
  j["command"] = report.command;
  j["verdict"] = report.passed() ? "pass" : "fail";
  ojson recs = ojson::array();
  for (const Record& r : report.records) {
    ojson o;
    o["name"] = r.name;
    o["inputs_digest"] = r.inputs_digest;
    o["kind"] = r.exact_pass ? "exact" : "residual";
    o["residual"] = r.residual ? number_or_null(*r.residual) : ojson(nullptr);
    o["exact_pass"] = r.exact_pass ? ojson(*r.exact_pass) : ojson(nullptr);
    o["tolerance"] = r.tolerance;
    o["passed"] = r.passed;
    if (include_timing) o["wall_time"] = r.wall_time;
    o["error"] = r.error;
    o["details"] = r.details;
    if (r.table) {
      ojson rows = ojson::array();
      for (const auto& row : r.table->rows) {
        ojson cells = ojson::array();
        for (double v : row) cells.push_back(number_or_null(v));
        rows.push_back(cells);
      }
      o["table"] = {{"name", r.table->name}, {"columns", r.table->columns}, {"rows", rows}};
    }
    recs.push_back(o);
  }
  j["records"] = recs;
  return j;
}

Report report_from_json(const ojson& j) {
  Report rep;
  rep.command = j.at("command").get<std::string>();
  for (const auto& o : j.at("records")) {
    Record r;
    r.name = o.at("name").get<std::string>();
    r.inputs_digest = o.at("inputs_digest").get<std::string>();
    if (!o.at("residual").is_null()) r.residual = o.at("residual").get<double>();
    else if (o.at("kind") == "residual" && o.at("error").get<std::string>().empty()) r.residual = std::nan("");
    if (!o.at("exact_pass").is_null()) r.exact_pass = o.at("exact_pass").get<bool>();
    r.tolerance = o.at("tolerance").get<double>();
    r.passed = o.at("passed").get<bool>();
    if (o.contains("wall_time")) r.wall_time = o.at("wall_time").get<double>();
    r.error = o.at("error").get<std::string>();
    r.details = o.at("details");
    if (o.contains("table")) {
      const auto& t = o.at("table");
      Table tab{t.at("name").get<std::string>(), t.at("columns").get<std::vector<std::string>>(), {}};
      for (const auto& row : t.at("rows")) {
        std::vector<double> cells;
        for (const auto& v : row) cells.push_back(v.is_null() ? std::nan("") : v.get<double>());
        tab.rows.push_back(cells);
      }
      r.table = tab;
    }
    rep.records.push_back(std::move(r));
  }
  return rep;
}

std::vector<std::string> emit_report(const Report& report, const std::string& dir, const std::vector<std::string>& formats) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  const fs::path json_path = fs::path(dir) / "report.json";
  write_file(json_path, report_to_json(report).dump(2) + "\n");
  written.push_back(json_path.string());
  if (std::find(formats.begin(), formats.end(), "csv") == formats.end()) return written;

  std::ostringstream rec;
  rec << "name,inputs_digest,kind,residual,exact_pass,tolerance,passed,wall_time,error\n";
  for (const Record& r : report.records) {
    rec << csv_field(r.name) << ',' << r.inputs_digest << ',' << (r.exact_pass ? "exact" : "residual") << ','
        << (r.residual ? csv_number(*r.residual) : "") << ',' << (r.exact_pass ? (*r.exact_pass ? "true" : "false") : "")
        << ',' << csv_number(r.tolerance) << ',' << (r.passed ? "true" : "false") << ',' << csv_number(r.wall_time) << ','
        << csv_field(r.error) << '\n';
  }
  const fs::path rec_path = fs::path(dir) / "records.csv";
  write_file(rec_path, rec.str());
  written.push_back(rec_path.string());
  for (const Record& r : report.records) {
    if (!r.table) continue;
    std::ostringstream t;
    for (std::size_t c = 0; c < r.table->columns.size(); ++c) t << (c ? "," : "") << r.table->columns[c];
    t << '\n';
    for (const auto& row : r.table->rows) {
      for (std::size_t c = 0; c < row.size(); ++c) t << (c ? "," : "") << csv_number(row[c]);
      t << '\n';
    }
    const fs::path p = fs::path(dir) / (r.table->name + ".csv");
    write_file(p, t.str());
    written.push_back(p.string());
  }
  return written;
}

}  // namespace dwc
