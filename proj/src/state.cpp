#include "cantor/state.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cantor/errors.hpp"
#include "json.hpp"

namespace cantor {

namespace {

using json = nlohmann::ordered_json;

json sc_json(const ScaledComplex& v) {
  return json::array({v.m.real(), v.m.imag(), v.e});
}

json sr_json(const ScaledReal& v) { return json::array({v.m, v.e}); }

bool sc_match(const ScaledComplex& v, const json& j) {
  return j.is_array() && j.size() == 3 &&
         j[0].get<double>() == v.m.real() && j[1].get<double>() == v.m.imag() &&
         j[2].get<int64_t>() == v.e;
}

bool sr_match(const ScaledReal& v, const json& j) {
  return j.is_array() && j.size() == 2 && j[0].get<double>() == v.m &&
         j[1].get<int64_t>() == v.e;
}

json component_summary(const ComponentRegion& comp) {
  json j;
  j["anchor"] = comp.anchor;
  j["birth"] = comp.pole_birth;
  j["parent"] = comp.parent;
  j["horizontal"] = comp.horizontal;
  j["diam_hi"] = sr_json(comp.diam_hi);
  j["out_radius"] = sr_json(comp.out_radius);
  j["in_radius"] = sr_json(comp.in_radius);
  j["cell_tol"] = sr_json(comp.cell_tol);
  return j;
}

bool summary_match(const ComponentRegion& comp, const json& j) {
  return j["anchor"].get<int>() == comp.anchor &&
         j["birth"].get<int>() == comp.pole_birth &&
         j["parent"].get<int>() == comp.parent &&
         j["horizontal"].get<bool>() == comp.horizontal &&
         sr_match(comp.diam_hi, j["diam_hi"]) &&
         sr_match(comp.out_radius, j["out_radius"]) &&
         sr_match(comp.in_radius, j["in_radius"]) &&
         sr_match(comp.cell_tol, j["cell_tol"]);
}

}  // namespace

std::string serialize_state(const Construction& c) {
  json j;
  j["schema_version"] = kStateSchemaVersion;
  j["seed"] = c.seed;
  j["depth"] = c.depth();

  json sched;
  json a = json::array();
  for (const cplx& v : c.s.a) a.push_back(json::array({v.real(), v.imag()}));
  sched["a"] = std::move(a);
  sched["eps"] = c.s.eps;
  sched["R"] = c.s.R;
  sched["delta"] = c.s.delta;
  json margins = json::array();
  for (const MarginRecord& m : c.s.margins) {
    json row;
    row["constraint"] = m.constraint;
    row["level"] = m.level;
    row["slack"] = m.slack;
    margins.push_back(std::move(row));
  }
  sched["margins"] = std::move(margins);
  j["schedule"] = std::move(sched);

  json nodes = json::array();
  for (const PoleNode& node : c.t.nodes) {
    json row;
    row["birth"] = node.birth;
    row["parent"] = node.parent;
    row["chart"] = node.chart;
    row["offset"] = sc_json(node.offset);
    row["residue"] = sc_json(node.residue);
    nodes.push_back(std::move(row));
  }
  j["tower"] = {{"depth", c.t.depth}, {"nodes", std::move(nodes)}};

  json levels = json::array();
  for (const LevelVerdicts& v : c.levels) {
    json row;
    row["level"] = v.level;
    row["components"] = v.components;
    row["horizontal"] = v.horizontal;
    row["vertical"] = v.vertical;
    row["max_diam_log2"] = v.max_diam_log2;
    row["min_pair_gap"] = v.min_pair_gap;
    row["nest_margin"] = v.nest_margin;
    if (std::isfinite(v.sigma)) row["sigma"] = v.sigma;
    else row["sigma"] = nullptr;
    const RegionDecomposition& d = c.decomps[v.level - 1];
    row["R"] = d.R;
    json comps = json::array();
    for (const ComponentRegion& comp : d.components)
      comps.push_back(component_summary(comp));
    row["component_summaries"] = std::move(comps);
    levels.push_back(std::move(row));
  }
  j["levels"] = std::move(levels);

  return j.dump(2) + "\n";
}

Construction parse_state(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw usage_error(std::string("state parse failed: ") + e.what());
  }
  try {
    if (!j.contains("schema_version") ||
        j["schema_version"].get<int>() != kStateSchemaVersion)
      throw usage_error("state schema version mismatch");

    Construction c;
    c.seed = j["seed"].get<uint64_t>();
    const int depth = j["depth"].get<int>();

    const json& sched = j["schedule"];
    c.s = ParameterSchedule{};
    for (const json& v : sched["a"])
      c.s.a.push_back({v[0].get<double>(), v[1].get<double>()});
    c.s.eps = sched["eps"].get<std::vector<double>>();
    c.s.R = sched["R"].get<std::vector<double>>();
    c.s.delta = sched["delta"].get<std::vector<double>>();
    for (const json& row : sched["margins"])
      c.s.margins.push_back({row["constraint"].get<std::string>(),
                             row["level"].get<int>(),
                             row["slack"].get<double>()});
    if (static_cast<int>(c.s.a.size()) != depth + 1 ||
        static_cast<int>(c.s.eps.size()) != depth + 1 ||
        static_cast<int>(c.s.R.size()) != depth + 1 ||
        static_cast<int>(c.s.delta.size()) != depth + 1)
      throw usage_error("state schedule arrays truncated");

    // Replay the deterministic construction and hold the stored tables to it.
    c.t = make_tower();
    for (int n = 1; n <= depth; ++n) advance_tower(c.t, c.s.a[n], c.s.eps[n]);

    const json& tower = j["tower"];
    if (tower["depth"].get<int>() != c.t.depth)
      throw verification_error("state tower depth disagrees with replay");
    const json& nodes = tower["nodes"];
    if (nodes.size() != c.t.nodes.size())
      throw verification_error("state pole catalogue size disagrees with replay");
    for (size_t i = 0; i < nodes.size(); ++i) {
      const PoleNode& node = c.t.nodes[i];
      const json& row = nodes[i];
      if (row["birth"].get<int>() != node.birth ||
          row["parent"].get<int>() != node.parent ||
          row["chart"].get<int>() != node.chart ||
          !sc_match(node.offset, row["offset"]) ||
          !sc_match(node.residue, row["residue"]))
        throw verification_error("state pole catalogue disagrees with replay");
    }

    const json& levels = j["levels"];
    if (static_cast<int>(levels.size()) != depth)
      throw usage_error("state level summaries truncated");
    for (int n = 1; n <= depth; ++n) {
      const json& row = levels[n - 1];
      RegionDecomposition d = decompose(c.t, n, row["R"].get<double>());
      if (n >= 2) link_decompositions(c.t, c.decomps[n - 2], d);
      const json& comps = row["component_summaries"];
      if (comps.size() != d.components.size())
        throw verification_error(
            "state component summaries disagree with recomputation");
      for (size_t i = 0; i < comps.size(); ++i)
        if (!summary_match(d.components[i], comps[i]))
          throw verification_error(
              "state component summaries disagree with recomputation");
      c.decomps.push_back(std::move(d));

      LevelVerdicts v;
      v.level = row["level"].get<int>();
      if (v.level != n) throw usage_error("state level summaries out of order");
      v.components = row["components"].get<int>();
      v.horizontal = row["horizontal"].get<int>();
      v.vertical = row["vertical"].get<int>();
      v.max_diam_log2 = row["max_diam_log2"].get<double>();
      v.min_pair_gap = row["min_pair_gap"].get<double>();
      v.nest_margin = row["nest_margin"].get<double>();
      v.sigma = row["sigma"].is_null()
                    ? std::numeric_limits<double>::infinity()
                    : row["sigma"].get<double>();
      c.levels.push_back(v);
    }
    return c;
  } catch (const json::exception& e) {
    throw usage_error(std::string("state fields malformed: ") + e.what());
  }
}

void save_state(const Construction& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw usage_error("cannot open state file for writing: " + path);
  out << serialize_state(c);
  if (!out) throw usage_error("state write failed: " + path);
}

Construction load_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw usage_error("cannot open state file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_state(buf.str());
}

}  // namespace cantor
