#include "cantor/exports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "cantor/cantor_set.hpp"
#include "cantor/embedding.hpp"
#include "cantor/errors.hpp"

namespace cantor {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Convex hull (monotone chain) of 2-d points; returns the hull vertices.
std::vector<std::pair<double, double>> convex_hull(
    std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  size_t n = pts.size();
  if (n <= 2) return pts;
  auto cross = [](const std::pair<double, double>& o,
                  const std::pair<double, double>& a,
                  const std::pair<double, double>& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Cell rectangle in frame-unit coordinates [-1, 1]^2.
struct UnitRect {
  double x0, y0, x1, y1;
};

UnitRect cell_rect(const RegionCell& cell) {
  double size = std::ldexp(2.0, -cell.depth);
  double x0 = -1.0 + cell.ix * size;
  double y0 = -1.0 + cell.iy * size;
  return {x0, y0, x0 + size, y0 + size};
}

const char* fill_for(const ComponentRegion& comp, bool boundary) {
  if (comp.horizontal) return boundary ? "#f4b183" : "#e06c1f";
  return boundary ? "#9dc3e6" : "#2e74b5";
}

// Header with a white background; viewport is width x height pixels.
std::string svg_open(int width, int height) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"";
  s += std::to_string(width);
  s += "\" height=\"";
  s += std::to_string(height);
  s += "\" viewBox=\"0 0 " + std::to_string(width) + " " +
       std::to_string(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  return s;
}

void svg_text(std::string& s, double x, double y, const std::string& text,
              int size = 12) {
  s += "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-family=\"monospace\" font-size=\"" +
       std::to_string(size) + "\" fill=\"#333333\">" + text + "</text>\n";
}

// Chart panel mapping: z-chart position -> pixel, centered, range +-extent.
struct PanelMap {
  double cx, cy, half, extent;
  double X(double re) const { return cx + half * re / extent; }
  double Y(double im) const { return cy - half * im / extent; }
};

void panel_frame(std::string& s, const PanelMap& p, const std::string& label) {
  s += "<rect x=\"" + px(p.cx - p.half) + "\" y=\"" + px(p.cy - p.half) +
       "\" width=\"" + px(2 * p.half) + "\" height=\"" + px(2 * p.half) +
       "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
  svg_text(s, p.cx - p.half, p.cy - p.half - 6, label);
}

int level_arg_check(const Construction& c, int level) {
  if (level < 1 || level > c.depth())
    throw usage_error("export: level not present in the construction");
  return level;
}

}  // namespace

std::string poles_csv(const Construction& c, int level) {
  if (level < 0 || level > c.depth())
    throw usage_error("export: level not present in the construction");
  std::string out =
      "level,node,birth,parent,chart,pos_re,pos_im,"
      "offset_m_re,offset_m_im,offset_e,residue_m_re,residue_m_im,residue_e\n";
  for (int node : c.t.level_poles[level]) {
    const PoleNode& p = c.t.nodes[node];
    cplx pos = node_chart_position(c.t, node).to_cplx();
    out += std::to_string(level) + "," + std::to_string(node) + "," +
           std::to_string(p.birth) + "," + std::to_string(p.parent) + "," +
           std::to_string(p.chart) + "," + num(pos.real()) + "," +
           num(pos.imag()) + "," + num(p.offset.m.real()) + "," +
           num(p.offset.m.imag()) + "," + std::to_string(p.offset.e) + "," +
           num(p.residue.m.real()) + "," + num(p.residue.m.imag()) + "," +
           std::to_string(p.residue.e) + "\n";
  }
  return out;
}

std::string schedule_csv(const Construction& c) {
  std::string out = "n,a_re,a_im,eps,R,delta,sigma\n";
  for (int n = 1; n <= c.depth(); ++n) {
    double sigma = c.levels[n - 1].sigma;
    out += std::to_string(n) + "," + num(c.s.a[n].real()) + "," +
           num(c.s.a[n].imag()) + "," + num(c.s.eps[n]) + "," +
           num(c.s.R[n]) + "," + num(c.s.delta[n]) + "," +
           (std::isfinite(sigma) ? num(sigma) : std::string("inf")) + "\n";
  }
  return out;
}

std::string components_csv(const Construction& c) {
  std::string out =
      "level,id,anchor,birth,parent,horizontal,diam_lo_m,diam_lo_e,"
      "diam_hi_m,diam_hi_e,out_radius_m,out_radius_e,in_radius_m,"
      "in_radius_e,cell_tol_m,cell_tol_e,cells\n";
  for (const RegionDecomposition& d : c.decomps) {
    for (const ComponentRegion& comp : d.components) {
      out += std::to_string(d.level) + "," + std::to_string(comp.id) + "," +
             std::to_string(comp.anchor) + "," +
             std::to_string(comp.pole_birth) + "," +
             std::to_string(comp.parent) + "," +
             (comp.horizontal ? "1" : "0") + "," + num(comp.diam_lo.m) + "," +
             std::to_string(comp.diam_lo.e) + "," + num(comp.diam_hi.m) +
             "," + std::to_string(comp.diam_hi.e) + "," +
             num(comp.out_radius.m) + "," + std::to_string(comp.out_radius.e) +
             "," + num(comp.in_radius.m) + "," +
             std::to_string(comp.in_radius.e) + "," + num(comp.cell_tol.m) +
             "," + std::to_string(comp.cell_tol.e) + "," +
             std::to_string(comp.cells.size()) + "\n";
    }
  }
  return out;
}

std::string hausdorff_csv(const Construction& c) {
  if (c.depth() < 2)
    throw usage_error("export: cover-sum table needs depth >= 2");
  std::vector<CantorApprox> ladder;
  for (int N = 2; N <= c.depth(); ++N)
    ladder.push_back(build_approx(c.t, N, c.decomps));
  DimensionTrend tr = dimension_trend(ladder);
  std::string out = "depth,eps,cover_sum,reference_bound,monotone_beyond_onset\n";
  for (const DimensionTrendRow& row : tr.rows) {
    size_t which = 0;
    for (size_t i = 0; i < tr.eps.size(); ++i)
      if (tr.eps[i] == row.eps) which = i;
    out += std::to_string(row.depth) + "," + num(row.eps) + "," +
           num(row.sum) + "," + num(row.bound) + "," +
           (tr.monotone[which] ? "1" : "0") + "\n";
  }
  return out;
}

std::string regions_svg(const Construction& c, int level) {
  level_arg_check(c, level);
  const RegionDecomposition& d = c.decomps[level - 1];

  // layout: one chart panel on the left, a grid of island panels right
  const int chart = 420, cell = 130, per_row = 4;
  int rows = (static_cast<int>(d.components.size()) + per_row - 1) / per_row;
  int width = chart + 40 + per_row * (cell + 10) + 20;
  int height = std::max(chart + 80, rows * (cell + 34) + 60);
  std::string s = svg_open(width, height);

  PanelMap cm{30.0 + chart / 2.0, 50.0 + chart / 2.0, chart / 2.0,
              1.4 * d.R};
  panel_frame(s, cm, "chart view, level " + std::to_string(level));
  // bidisc footprint: the square of half-side R_n
  s += "<rect x=\"" + px(cm.X(-d.R)) + "\" y=\"" + px(cm.Y(d.R)) +
       "\" width=\"" + px(2 * cm.half * d.R / cm.extent) + "\" height=\"" +
       px(2 * cm.half * d.R / cm.extent) +
       "\" fill=\"none\" stroke=\"#559955\" stroke-width=\"1\" "
       "stroke-dasharray=\"6,4\"/>\n";
  svg_text(s, cm.X(-d.R), cm.Y(d.R) - 4, "|x| = R", 10);
  for (const ComponentRegion& comp : d.components) {
    const PoleNode& node = c.t.nodes[comp.anchor];
    double mx, my;
    if (node.chart == 1) {
      // the infinity cluster has no z-chart position; pin it to a corner
      mx = cm.cx + cm.half - 14;
      my = cm.cy - cm.half + 14;
    } else {
      cplx pos = node_chart_position(c.t, comp.anchor).to_cplx();
      mx = cm.X(pos.real());
      my = cm.Y(pos.imag());
    }
    s += "<circle cx=\"" + px(mx) + "\" cy=\"" + px(my) +
         "\" r=\"4\" fill=\"" + fill_for(comp, false) + "\"/>\n";
  }

  double gx0 = chart + 60;
  for (size_t i = 0; i < d.components.size(); ++i) {
    const ComponentRegion& comp = d.components[i];
    double x0 = gx0 + (i % per_row) * (cell + 10);
    double y0 = 50.0 + (i / per_row) * (cell + 34);
    s += "<rect x=\"" + px(x0) + "\" y=\"" + px(y0) + "\" width=\"" +
         px(cell) + "\" height=\"" + px(cell) +
         "\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
    svg_text(s, x0, y0 + cell + 14,
             "#" + std::to_string(comp.id) + " b" +
                 std::to_string(comp.pole_birth) +
                 (comp.horizontal ? " h" : " v"),
             10);
    for (const RegionCell& rc : comp.cells) {
      UnitRect r = cell_rect(rc);
      double cx0 = x0 + (r.x0 + 1.0) * cell / 2.0;
      double cy0 = y0 + (1.0 - r.y1) * cell / 2.0;
      double w = (r.x1 - r.x0) * cell / 2.0;
      s += "<rect x=\"" + px(cx0) + "\" y=\"" + px(cy0) + "\" width=\"" +
           px(w) + "\" height=\"" + px(w) + "\" fill=\"" +
           fill_for(comp, rc.boundary) + "\"/>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

std::string cantor_svg(const Construction& c) {
  if (c.depth() < 1) throw usage_error("export: empty construction");
  const int level = c.depth();
  const RegionDecomposition& d = c.decomps[level - 1];
  CantorApprox ap = build_approx(c.t, level, c.decomps);

  const int chart = 420, cell = 130, per_row = 4;
  int rows = (static_cast<int>(d.components.size()) + per_row - 1) / per_row;
  int width = chart + 40 + per_row * (cell + 10) + 20;
  int height = std::max(chart + 80, rows * (cell + 34) + 60);
  std::string s = svg_open(width, height);

  PanelMap cm{30.0 + chart / 2.0, 50.0 + chart / 2.0, chart / 2.0,
              1.4 * d.R};
  panel_frame(s, cm,
              "limit-set approximation, depth " + std::to_string(level) +
                  ", " + std::to_string(ap.witnesses.size()) + " points");
  for (const AnchoredPoint& w : ap.witnesses) {
    const PoleNode& node = c.t.nodes[w.node];
    double mx, my;
    if (node.chart == 1) {
      mx = cm.cx + cm.half - 14;
      my = cm.cy - cm.half + 14;
    } else {
      cplx pos = node_chart_position(c.t, w.node).to_cplx();
      mx = cm.X(pos.real());
      my = cm.Y(pos.imag());
    }
    s += "<circle cx=\"" + px(mx) + "\" cy=\"" + px(my) +
         "\" r=\"3\" fill=\"#7030a0\"/>\n";
  }

  double gx0 = chart + 60;
  for (size_t i = 0; i < d.components.size(); ++i) {
    const ComponentRegion& comp = d.components[i];
    double x0 = gx0 + (i % per_row) * (cell + 10);
    double y0 = 50.0 + (i / per_row) * (cell + 34);
    s += "<rect x=\"" + px(x0) + "\" y=\"" + px(y0) + "\" width=\"" +
         px(cell) + "\" height=\"" + px(cell) +
         "\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
    svg_text(s, x0, y0 + cell + 14, "#" + std::to_string(comp.id), 10);
    std::vector<std::pair<double, double>> corners;
    for (const RegionCell& rc : comp.cells) {
      UnitRect r = cell_rect(rc);
      corners.push_back({r.x0, r.y0});
      corners.push_back({r.x0, r.y1});
      corners.push_back({r.x1, r.y0});
      corners.push_back({r.x1, r.y1});
    }
    std::vector<std::pair<double, double>> hull = convex_hull(corners);
    std::string pts;
    for (const auto& [ux, uy] : hull) {
      double hx = x0 + (ux + 1.0) * cell / 2.0;
      double hy = y0 + (1.0 - uy) * cell / 2.0;
      pts += px(hx) + "," + px(hy) + " ";
    }
    s += "<polygon points=\"" + pts +
         "\" fill=\"#d9c2ec\" stroke=\"#7030a0\" stroke-width=\"1\"/>\n";
    // the witness at the island center
    double wx = x0 + cell / 2.0, wy = y0 + cell / 2.0;
    s += "<circle cx=\"" + px(wx) + "\" cy=\"" + px(wy) +
         "\" r=\"2.5\" fill=\"#7030a0\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string curve_svg(const Construction& c, int level) {
  level_arg_check(c, level);
  const double R = c.s.R[level];
  const int panel = 360;
  int width = 2 * panel + 90, height = panel + 90;
  std::string s = svg_open(width, height);

  PanelMap pm[2] = {
      {30.0 + panel / 2.0, 50.0 + panel / 2.0, panel / 2.0, 1.1 * R},
      {60.0 + panel + panel / 2.0, 50.0 + panel / 2.0, panel / 2.0, 1.1 * R}};
  panel_frame(s, pm[0], "first coordinate, level " + std::to_string(level));
  panel_frame(s, pm[1], "second coordinate");
  for (const PanelMap& p : pm) {
    s += "<circle cx=\"" + px(p.cx) + "\" cy=\"" + px(p.cy) + "\" r=\"" +
         px(p.half * R / p.extent) +
         "\" fill=\"none\" stroke=\"#559955\" stroke-width=\"1\" "
         "stroke-dasharray=\"6,4\"/>\n";
  }

  // a circle comfortably inside the kept set at every level
  const int samples = 720;
  std::string path0, path1;
  for (int k = 0; k < samples; ++k) {
    double th = 2.0 * kPi * k / samples;
    AnchoredPoint z;
    z.global = make_point(std::polar(1.0 / 3.0, th));
    C2Point img = gamma(c.t, level, z);
    if (img.infinite) continue;
    path0 += (path0.empty() ? "M" : "L") + px(pm[0].X(img.x.real())) + " " +
             px(pm[0].Y(img.x.imag()));
    path1 += (path1.empty() ? "M" : "L") + px(pm[1].X(img.y.real())) + " " +
             px(pm[1].Y(img.y.imag()));
  }
  s += "<path d=\"" + path0 +
       "\" fill=\"none\" stroke=\"#e06c1f\" stroke-width=\"1\"/>\n";
  s += "<path d=\"" + path1 +
       "\" fill=\"none\" stroke=\"#2e74b5\" stroke-width=\"1\"/>\n";
  s += "</svg>\n";
  return s;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw usage_error("cannot open output file: " + path);
  out << content;
  if (!out) throw usage_error("write failed: " + path);
}

}  // namespace cantor
