#include "tubelab/plots.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tubelab/error.hpp"

namespace tubelab {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<double> guide_slope(const std::string& tag, double delta, double p) {
  if (tag == "P1") return 1 + delta / 2;
  if (tag == "P2") return 1 - 1.5 * delta;
  if (tag == "Q1") return 2 * delta + 4 * p - 4;
  if (tag == "Q2") return 2 * (delta - 1);
  return std::nullopt;
}

std::string plot_script(const json& report, const std::string& csv_name) {
  const std::string tag = report.value("theorem_tag", "");
  const double delta = report.value("delta", 0.3);
  const double p = report.value("p", 0.9);
  const auto slope = guide_slope(tag, delta, p);
  // Klaus integrals are negative and grow like log(1/eps): semilog axes.
  const bool loglog = tag != "KLAUS";
  std::ostringstream os;
  char buf[64];
  os << "#!/usr/bin/env python3\n"
     << "# " << tag << " report " << report.value("experiment_id", "") << "\n"
     << "import csv, math, os\n"
     << "import matplotlib\n"
     << "matplotlib.use('Agg')\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "here = os.path.dirname(os.path.abspath(__file__))\n"
     << "with open(os.path.join(here, '" << csv_name << "')) as f:\n"
     << "    rows = list(csv.DictReader(f))\n"
     << "eps = [float(r['epsilon']) for r in rows]\n"
     << "skip = {'epsilon', 'iterations', 'sector_bound', 'bound', 'limit', 'oracle_integral', 'envelope_ok',\n"
     << "        'envelope_worst', 'l1_norm', 'l1_refined', 'pointwise_residual', 'grid_value'}\n"
     << "cols = [c for c in rows[0] if c not in skip]\n"
     << "fig, ax = plt.subplots()\n"
     << "for c in cols:\n"
     << "    ax.plot(eps, [float(r[c]) for r in rows], 'o-', label=c)\n";
  if (slope) {
    std::snprintf(buf, sizeof buf, "%.17g", *slope);
    os << "slope = " << buf << "\n"
       << "ref = float(rows[-1][cols[0]])\n"
       << "ax.plot(eps, [ref * (e / eps[-1]) ** slope for e in eps], 'k--', label='slope %.3g' % slope)\n";
  }
  os << "ax.set_xscale('log')\n";
  if (loglog) os << "ax.set_yscale('log')\n";
  os << "ax.set_xlabel('epsilon')\n"
     << "ax.set_title('" << tag << "')\n"
     << "ax.legend()\n"
     << "fig.savefig(os.path.join(here, 'plot_" << tag << ".png'), dpi=150)\n";
  return os.str();
}

std::vector<std::string> emit_plots(const std::vector<std::string>& report_paths) {
  std::vector<std::string> out;
  for (const auto& path : report_paths) {
    if (!fs::exists(path)) fail("report-not-found", path + " does not exist");
    std::ifstream in(path);
    json report;
    try {
      report = json::parse(in);
    } catch (const json::exception& e) {
      fail("report-invalid", path + ": " + e.what());
    }
    const fs::path dir = fs::path(path).parent_path();
    const std::string csv = report.value("csv", "report.csv");
    if (!fs::exists(dir / csv)) fail("report-not-found", (dir / csv).string() + " does not exist");
    const fs::path script = dir / ("plot_" + report.value("theorem_tag", "report") + ".py");
    std::ofstream f(script);
    f << plot_script(report, csv);
    if (!f) fail("write-failed", "cannot write " + script.string());
    out.push_back(script.string());
  }
  return out;
}

}  // namespace tubelab
