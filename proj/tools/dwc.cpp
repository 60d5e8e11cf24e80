#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "dwc/suite.hpp"

namespace {

std::vector<std::string> split_formats(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification suite for fiberwise quantization of Hamiltonian reductions"};
  app.require_subcommand(1);
  std::string config_path, out_dir, formats;
  int jobs = 1;
  for (const std::string& name : dwc::subcommands()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " checks");
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--format", formats, "comma separated list of json, csv");
    sub->add_option("--jobs", jobs, "worker threads")->envname("DWC_JOBS")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  const std::string which = app.get_subcommands().front()->get_name();

  dwc::SuiteConfig cfg;
  try {
    cfg = dwc::parse_config(config_path);
    if (!formats.empty()) {
      cfg.formats = split_formats(formats);
      for (const auto& f : cfg.formats)
        if (f != "json" && f != "csv") throw dwc::ConfigError("--format", "unknown format '" + f + "'");
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
  } catch (const dwc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const dwc::Report report = dwc::run_suite(cfg, which, jobs);
  for (const dwc::Record& r : report.records) {
    std::printf("%-4s %-52s", r.passed ? "ok" : "FAIL", r.name.c_str());
    if (r.exact_pass) std::printf(" exact");
    else if (r.residual) std::printf(" %.3e (tol %.1e)", *r.residual, r.tolerance);
    if (!r.error.empty()) std::printf(" error: %s", r.error.c_str());
    std::printf("\n");
  }
  try {
    for (const auto& path : dwc::emit_report(report, cfg.out_dir, cfg.formats)) std::printf("wrote %s\n", path.c_str());
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return 2;
  }
  std::printf("%s: %s (%zu checks)\n", which.c_str(), report.passed() ? "pass" : "fail", report.records.size());
  return report.passed() ? 0 : 1;
}
