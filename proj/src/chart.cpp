#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gss/analysis.hpp"

namespace gss {

namespace {

struct Series {
  std::string label;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::vector<double> x;
  std::vector<Series> series;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string render(const std::string& title, const std::string& xlabel, const std::vector<Panel>& panels) {
  const int pw = 320, ph = 220, cols = 2, margin = 50;
  const int rows = static_cast<int>((panels.size() + cols - 1) / cols);
  const int width = cols * pw, height = rows * ph + 40;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& pan = panels[p];
    const int ox = static_cast<int>(p % cols) * pw, oy = 40 + static_cast<int>(p / cols) * ph;
    const int left = ox + margin, right = ox + pw - 15, top = oy + 22, bottom = oy + ph - 35;
    double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    for (double v : pan.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (const auto& s : pan.series)
      for (double v : s.y)
        if (std::isfinite(v)) {
          ymin = std::min(ymin, v);
          ymax = std::max(ymax, v);
        }
    if (!std::isfinite(xmin)) continue;
    if (xmax == xmin) xmax = xmin + 1.0;
    if (!std::isfinite(ymin)) ymin = ymax = 0.0;
    if (ymax == ymin) {
      ymax += 0.5 * std::max(1.0, std::abs(ymax));
      ymin -= 0.5 * std::max(1.0, std::abs(ymin));
    }
    auto sx = [&](double v) { return left + (v - xmin) / (xmax - xmin) * (right - left); };
    auto sy = [&](double v) { return bottom - (v - ymin) / (ymax - ymin) * (bottom - top); };
    os << "<text x=\"" << (left + right) / 2 << "\" y=\"" << oy + 14 << "\" text-anchor=\"middle\">" << pan.title
       << "</text>\n";
    os << "<polyline fill=\"none\" stroke=\"#444\" points=\"" << left << ',' << top << ' ' << left << ',' << bottom
       << ' ' << right << ',' << bottom << "\"/>\n";
    os << "<text x=\"" << left - 4 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">" << fmt(ymax) << "</text>\n";
    os << "<text x=\"" << left - 4 << "\" y=\"" << bottom << "\" text-anchor=\"end\">" << fmt(ymin) << "</text>\n";
    for (double v : pan.x)
      os << "<text x=\"" << sx(v) << "\" y=\"" << bottom + 14 << "\" text-anchor=\"middle\">" << fmt(v)
         << "</text>\n";
    os << "<text x=\"" << (left + right) / 2 << "\" y=\"" << bottom + 28 << "\" text-anchor=\"middle\">" << xlabel
       << "</text>\n";
    for (std::size_t s = 0; s < pan.series.size(); ++s) {
      const auto& ser = pan.series[s];
      const char* color = kColors[s % 4];
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < pan.x.size() && k < ser.y.size(); ++k)
        if (std::isfinite(ser.y[k])) os << sx(pan.x[k]) << ',' << sy(ser.y[k]) << ' ';
      os << "\"/>\n";
      for (std::size_t k = 0; k < pan.x.size() && k < ser.y.size(); ++k)
        if (std::isfinite(ser.y[k]))
          os << "<circle cx=\"" << sx(pan.x[k]) << "\" cy=\"" << sy(ser.y[k]) << "\" r=\"2.5\" fill=\"" << color
             << "\"/>\n";
      if (pan.series.size() > 1)
        os << "<text x=\"" << right - 4 << "\" y=\"" << top + 12 + 12 * static_cast<int>(s)
           << "\" text-anchor=\"end\" fill=\"" << color << "\">" << ser.label << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::string sweep_chart_svg(const SweepReport& rep) {
  std::vector<const SweepRow*> rows;
  for (const auto& r : rep.rows) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow* a, const SweepRow* b) { return a->value < b->value; });
  std::vector<double> x;
  for (const auto* r : rows) x.push_back(r->value);
  auto column = [&](double SweepRow::*c) {
    std::vector<double> y;
    for (const auto* r : rows) y.push_back(r->ok ? r->*c : std::nan(""));
    return y;
  };
  std::vector<Panel> panels{
      {"z_total", x, {{"z_total", column(&SweepRow::z_total)}}},
      {"z1 (cost)", x, {{"z1", column(&SweepRow::z1)}}},
      {"z2 (emission)", x, {{"z2", column(&SweepRow::z2)}}},
      {"z3 (quality)", x, {{"z3", column(&SweepRow::z3)}}},
      {"infeasibility", x, {{"delta", column(&SweepRow::infeasibility)}}},
      {"allowance traded", x, {{"buy", column(&SweepRow::buy_total)}, {"sell", column(&SweepRow::sell_total)}}},
      {"scenario deviation", x,
       {{"deviation1", column(&SweepRow::deviation1)}, {"deviation2", column(&SweepRow::deviation2)}}},
  };
  return render(std::string("Sweep over ") + to_string(rep.parameter), to_string(rep.parameter), panels);
}

std::string regimes_chart_svg(const RegimeComparison& cmp) {
  std::vector<const RegimeRow*> rows;
  for (const auto& r : cmp.rows) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const RegimeRow* a, const RegimeRow* b) { return a->cap_scale < b->cap_scale; });
  std::vector<double> x;
  for (const auto* r : rows) x.push_back(r->cap_scale);
  auto column = [&](auto get) {
    std::vector<double> y;
    for (const auto* r : rows) y.push_back(r->ok ? get(*r) : std::nan(""));
    return y;
  };
  std::vector<Panel> panels{
      {"z_total", x,
       {{"cap-and-trade", column([](const RegimeRow& r) { return r.trade.z_total; })},
        {"penalty", column([](const RegimeRow& r) { return r.penalty.z_total; })}}},
      {"z1 (cost)", x,
       {{"cap-and-trade", column([](const RegimeRow& r) { return r.trade.z1; })},
        {"penalty", column([](const RegimeRow& r) { return r.penalty.z1; })}}},
      {"z2 (emission)", x,
       {{"cap-and-trade", column([](const RegimeRow& r) { return r.trade.z2; })},
        {"penalty", column([](const RegimeRow& r) { return r.penalty.z2; })}}},
      {"gap (penalty - trade)", x, {{"gap", column([](const RegimeRow& r) { return r.gap; })}}},
  };
  return render("Cap-and-trade vs penalty", "cap_scale", panels);
}

}  // namespace gss
