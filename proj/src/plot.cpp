#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vsnash/errors.hpp"
#include "vsnash/harness.hpp"

namespace vsnash {

TraceTable read_trace_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read trace " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw ConfigError("trace " + path.string() + " is empty");
  if (line != "k,mse,rel_err,consensus_err,prox_evals,samples,comm_rounds,inner_solves")
    throw ConfigError("trace " + path.string() + " has an unexpected header");
  auto cell = [](const std::string& s) { return s.empty() ? std::nan("") : std::stod(s); };
  TraceTable t;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (!line.empty() && line.back() == ',') cols.emplace_back();
    if (cols.size() != 8) throw ConfigError("trace " + path.string() + " has a malformed row");
    try {
      t.k.push_back(cell(cols[0]));
      t.mse.push_back(cell(cols[1]));
      t.rel_err.push_back(cell(cols[2]));
      t.consensus_err.push_back(cell(cols[3]));
      t.samples.push_back(cell(cols[5]));
    } catch (const std::exception&) {
      throw ConfigError("trace " + path.string() + " has a non-numeric field");
    }
  }
  return t;
}

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v, bool log) {
  char buf[32];
  if (log)
    std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(std::lround(v)));
  else
    std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec) {
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto ok = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
  };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!ok(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!std::isfinite(x0)) return "";
  if (spec.log_y) {
    y0 = std::floor(y0);
    y1 = std::ceil(y1);
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kTop + (y1 - v) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(spec.title) << "</text>\n";
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  const int nt = 5;
  for (int t = 0; t <= nt; ++t) {
    const double xv = x0 + (x1 - x0) * t / nt;
    o << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kTop + ph + 16) << "\" text-anchor=\"middle\">"
      << tick_label(xv, spec.log_x) << "</text>\n";
  }
  const int ny = spec.log_y ? static_cast<int>(y1 - y0) : nt;
  const int ystep = std::max(1, ny / 8);
  for (int t = 0; t <= ny; t += ystep) {
    const double yv = y0 + (y1 - y0) * t / ny;
    o << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + pw) << "\" y1=\"" << num(py(yv)) << "\" y2=\""
      << num(py(yv)) << "\" stroke=\"#dddddd\"/>\n";
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">"
      << tick_label(yv, spec.log_y) << "</text>\n";
  }
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
    << escape(spec.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << num(kTop + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

  int drawn = 0;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!ok(s.x[i], s.y[i])) continue;
      pts += num(px(tx(s.x[i]))) + "," + num(py(ty(s.y[i]))) + " ";
    }
    if (pts.empty()) continue;
    pts.pop_back();
    const char* color = kColors[si % (sizeof kColors / sizeof *kColors)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
    const double ly = kTop + 14 + 16 * drawn;
    o << "<line x1=\"" << num(kLeft + pw - 150) << "\" x2=\"" << num(kLeft + pw - 130) << "\" y1=\"" << num(ly - 4)
      << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << num(kLeft + pw - 125) << "\" y=\"" << num(ly) << "\">" << escape(s.label) << "</text>\n";
    ++drawn;
  }
  o << "</svg>\n";
  return o.str();
}

std::vector<std::filesystem::path> emit_plots(const std::vector<std::filesystem::path>& traces,
                                              const std::filesystem::path& out_dir) {
  std::vector<PlotSeries> by_iter, by_samples;
  bool relative = true;
  std::vector<TraceTable> tables;
  for (const auto& p : traces) {
    tables.push_back(read_trace_csv(p));
    const auto& t = tables.back();
    if (t.k.empty()) {
      std::cerr << "warning: trace " << p.string() << " has no rows, skipped\n";
      continue;
    }
    if (std::none_of(t.rel_err.begin(), t.rel_err.end(), [](double v) { return v > 0; })) relative = false;
  }
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = tables[i];
    if (t.k.empty()) continue;
    std::string label = traces[i].parent_path().filename().string();
    if (label.empty()) label = traces[i].stem().string();
    const auto& y = relative ? t.rel_err : t.mse;
    by_iter.push_back({label, t.k, y});
    by_samples.push_back({label, t.samples, y});
  }
  std::vector<std::filesystem::path> written;
  if (by_iter.empty()) {
    std::cerr << "warning: no plottable traces\n";
    return written;
  }
  std::filesystem::create_directories(out_dir);
  const std::string ylab = relative ? "relative error" : "mean squared error";
  const std::pair<std::string, std::string> panels[] = {{"error_vs_iteration.svg", "iteration k"},
                                                        {"error_vs_samples.svg", "cumulative samples"}};
  for (int p = 0; p < 2; ++p) {
    PlotSpec spec;
    spec.title = ylab + " vs " + panels[p].second;
    spec.x_label = panels[p].second;
    spec.y_label = ylab;
    spec.log_x = p == 1;
    const std::string svg = render_svg(p == 0 ? by_iter : by_samples, spec);
    if (svg.empty()) {
      std::cerr << "warning: panel " << panels[p].first << " has no plottable points\n";
      continue;
    }
    const auto path = out_dir / panels[p].first;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << svg;
    written.push_back(path);
  }
  return written;
}

}  // namespace vsnash
