// Command-line driver: build/resume a construction state, re-verify its
// invariants, and export tables and figures.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error,
// 3 construction failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cantor/cantor_set.hpp"
#include "cantor/construction.hpp"
#include "cantor/embedding.hpp"
#include "cantor/errors.hpp"
#include "cantor/exports.hpp"
#include "cantor/state.hpp"
#include "cantor/tolerances.hpp"

namespace {

constexpr uint64_t kDefaultSeed = 20260822ull;

std::string num3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

uint64_t seed_from_env_or(uint64_t fallback) {
  const char* env = std::getenv("CANTOR_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  return std::strtoull(env, nullptr, 10);
}

std::pair<int, int> parse_levels(const std::string& spec, int depth) {
  if (spec.empty()) return {1, depth};
  size_t dots = spec.find("..");
  try {
    if (dots == std::string::npos) {
      int n = std::stoi(spec);
      return {n, n};
    }
    int lo = std::stoi(spec.substr(0, dots));
    int hi = std::stoi(spec.substr(dots + 2));
    return {lo, hi};
  } catch (const std::exception&) {
    throw cantor::usage_error("bad --levels spec: " + spec);
  }
}

struct VerifyStats {
  int checks = 0;
  int failures = 0;
  std::string first_failure;
};

void report(VerifyStats& st, int level, const std::string& name, bool pass,
            const std::string& detail) {
  ++st.checks;
  if (!pass) {
    ++st.failures;
    if (st.first_failure.empty()) st.first_failure = name;
  }
  std::printf("VERIFY\t%d\t%s\t%s\t%s\n", level, name.c_str(),
              pass ? "pass" : "FAIL", detail.c_str());
}

int cmd_build(const std::string& state_path, int depth, uint64_t seed,
              bool seed_given) {
  cantor::Construction c;
  if (std::filesystem::exists(state_path)) {
    c = cantor::load_state(state_path);
    if (seed_given && c.seed != seed)
      throw cantor::usage_error("state file was built with a different seed");
    std::fprintf(stderr, "loaded state at depth %d\n", c.depth());
  } else {
    c.seed = seed;
    c.s = cantor::make_schedule_base();
    c.t = cantor::make_tower();
  }
  if (c.depth() >= depth) {
    std::fprintf(stderr, "state already at depth %d >= %d, nothing to do\n",
                 c.depth(), depth);
    return 0;
  }
  while (c.depth() < depth) {
    cantor::advance_level(c);
    cantor::save_state(c, state_path);
    const cantor::LevelVerdicts& v = c.levels.back();
    std::fprintf(stderr,
                 "level %d: %d islands (%dh/%dv), max diameter 2^%.1f, "
                 "R = %.6g\n",
                 v.level, v.components, v.horizontal, v.vertical,
                 v.max_diam_log2, c.s.R[v.level]);
  }
  std::printf("built depth %d, state in %s\n", c.depth(), state_path.c_str());
  return 0;
}

int cmd_verify(const std::string& state_path, const std::string& levels_spec,
               int samples) {
  cantor::Construction c = cantor::load_state(state_path);
  auto [lo, hi] = parse_levels(levels_spec, c.depth());
  if (lo < 1 || hi > c.depth() || lo > hi)
    throw cantor::usage_error("--levels outside the built depth");
  VerifyStats st;

  for (int n = lo; n <= hi; ++n) {
    const cantor::RegionDecomposition& d = c.decomps[n - 1];

    // tower: Fibonacci pole law and separations
    bool fib = static_cast<int64_t>(c.t.level_poles[n].size()) ==
               cantor::fib_k(n);
    report(st, n, "pole-count", fib,
           std::to_string(c.t.level_poles[n].size()) + " of " +
               std::to_string(cantor::fib_k(n)));
    double sep = cantor::level_min_separation(c.t, n).to_double();
    report(st, n, "pole-separation", sep > 0.0, num3(sep));

    // regions: census, disjointness, diameters, nesting
    bool census =
        static_cast<int64_t>(d.components.size()) == cantor::b_count(n) &&
        d.horizontal_count ==
            (n % 2 == 0 ? cantor::fib_k(n) : cantor::fib_k(n - 1)) &&
        d.vertical_count ==
            (n % 2 == 0 ? cantor::fib_k(n - 1) : cantor::fib_k(n));
    report(st, n, "island-census", census,
           std::to_string(d.components.size()) + " islands, " +
               std::to_string(d.horizontal_count) + "h/" +
               std::to_string(d.vertical_count) + "v");
    report(st, n, "island-disjoint", d.disjoint,
           num3(d.min_pair_gap.to_double()));
    double b = static_cast<double>(cantor::b_count(n));
    cantor::ScaledReal worst(0.0);
    for (const cantor::ComponentRegion& comp : d.components)
      worst = max(worst, comp.diam_hi);
    bool small = worst.log2_abs() < -n * std::log2(b);
    report(st, n, "island-diameter", small,
           "log2 " + num3(worst.log2_abs()) + " vs " +
               num3(-n * std::log2(b)));
    if (n >= 2) {
      cantor::NestingReport nest =
          cantor::check_nesting(c.t, c.decomps[n - 2], d);
      report(st, n, "island-nesting", nest.ok,
             "margin " + num3(nest.min_margin_over_tol.to_double()) +
                 " tol units");
      cantor::SplitReport split =
          cantor::split_report(c.t, c.decomps[n - 2], d);
      bool split_ok = split.types_ok && split.counts_ok && split.locus_ok;
      report(st, n - 1, "island-splitting", split_ok,
             std::to_string(split.split_count) + " split / " +
                 std::to_string(split.shrink_count) + " shrink");
    }

    // embedding: corner and bidisc cover checks
    int corner = cantor::corner_violations(c.t, n, c.s.R[n], samples, c.seed);
    report(st, n, "far-corner-avoided", corner == 0,
           std::to_string(corner) + " violations");
    int mism = cantor::bidisc_membership_mismatches(c.t, n, c.s.R[n],
                                                    samples / 4, c.seed);
    report(st, n, "bidisc-membership", mism == 0,
           std::to_string(mism) + " mismatches");
    if (n >= 2) {
      cantor::InjectivityReport inj = cantor::injectivity_check(
          c.t, n, c.decomps[n - 2],
          cantor::sample_kept_boundary(c.t, c.decomps[n - 2]));
      report(st, n, "sampled-injectivity", inj.ok,
             "min pair " + num3(inj.min_pair_distance));
    }
    if (n >= 3) {
      std::vector<cantor::AnchoredPoint> shell =
          cantor::sample_shell(c.t, c.decomps[n - 2], d, 16);
      cantor::PropernessReport prop =
          cantor::properness_check(c.t, c.s, n, c.depth() - n, shell);
      report(st, n, "properness", prop.ok,
             "margin " + num3(prop.margin));
    }
  }

  // convergence from the lowest requested base
  {
    int k = std::max(1, lo);
    if (k < c.depth()) {
      std::vector<cantor::AnchoredPoint> sample =
          cantor::sample_kept_boundary(c.t, c.decomps[k - 1]);
      std::vector<cantor::AnchoredPoint> extra = cantor::sample_kept_random(
          c.t, k, c.s.R[k], std::max(0, samples - static_cast<int>(sample.size())),
          c.seed);
      sample.insert(sample.end(), extra.begin(), extra.end());
      cantor::CauchyReport rep =
          cantor::cauchy_check(c.t, c.s, k, c.depth(), sample);
      report(st, k, "convergence", rep.ok,
             "tail " + num3(rep.tail_sum) + " < " +
                 num3(c.s.delta[k]));
    }
  }

  // limit-set checks at the top of the requested range
  if (hi >= 2) {
    cantor::CantorApprox ap = cantor::build_approx(c.t, hi, c.decomps);
    report(st, hi, "witness-census",
           static_cast<int64_t>(ap.witnesses.size()) == cantor::b_count(hi),
           std::to_string(ap.witnesses.size()) + " witnesses");
    cantor::CantorPropertyReport props =
        cantor::cantor_property_report(c.t, ap, c.decomps);
    bool props_ok = props.nonempty && props.compact_proxy &&
                    props.diameter_trend && (hi < 4 || props.splitting_proxy);
    report(st, hi, "limit-set-properties", props_ok,
           props.notes.empty() ? "all verdicts hold" : props.notes.front());
    double sum = cantor::cover_sum(ap, 0.5);
    bool sum_ok = 0.5 * hi <= 1.0 || sum < std::pow(static_cast<double>(cantor::b_count(hi)), 1.0 - 0.5 * hi);
    report(st, hi, "cover-sum", sum_ok, num3(sum));
  }

  std::printf("%d checks, %d failures\n", st.checks, st.failures);
  if (st.failures > 0) {
    std::fprintf(stderr, "first failing invariant: %s\n",
                 st.first_failure.c_str());
    return 1;
  }
  return 0;
}

int cmd_render(const std::string& state_path, const std::string& target,
               int level, const std::string& out) {
  cantor::Construction c = cantor::load_state(state_path);
  if (level <= 0) level = c.depth();
  std::string svg;
  if (target == "regions") svg = cantor::regions_svg(c, level);
  else if (target == "cantor") svg = cantor::cantor_svg(c);
  else if (target == "curve") svg = cantor::curve_svg(c, level);
  else throw cantor::usage_error("unknown render target: " + target);
  cantor::write_text_file(out, svg);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_export(const std::string& state_path, const std::string& table,
               int level, const std::string& out) {
  cantor::Construction c = cantor::load_state(state_path);
  std::string csv;
  if (table == "poles") csv = cantor::poles_csv(c, level > 0 ? level : c.depth());
  else if (table == "schedule") csv = cantor::schedule_csv(c);
  else if (table == "components") csv = cantor::components_csv(c);
  else if (table == "hausdorff") csv = cantor::hausdorff_csv(c);
  else throw cantor::usage_error("unknown table: " + table);
  cantor::write_text_file(out, csv);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-depth executor for a Cantor-complement embedding"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string state_path = "cantor_state.json";
  app.add_option("--state", state_path, "state file path");

  auto* build = app.add_subcommand("build", "run or resume the construction");
  int depth = 6;
  uint64_t seed = 0;
  build->add_option("--depth", depth, "target depth");
  CLI::Option* seed_opt = build->add_option("--seed", seed, "random seed");

  auto* verify = app.add_subcommand("verify", "re-check invariants");
  std::string levels_spec;
  int samples = 10000;
  verify->add_option("--levels", levels_spec, "level range, e.g. 2..4");
  verify->add_option("--samples", samples, "random sample count");

  auto* render = app.add_subcommand("render", "write an SVG figure");
  std::string target = "regions", out_path = "out.svg";
  int level = 0;
  render->add_option("--target", target, "regions|cantor|curve");
  render->add_option("--level", level, "level (default: full depth)");
  render->add_option("--out", out_path, "output path");

  auto* exp = app.add_subcommand("export", "write a CSV table");
  std::string table = "schedule";
  std::string csv_path = "out.csv";
  int csv_level = 0;
  exp->add_option("--table", table, "poles|schedule|components|hausdorff");
  exp->add_option("--level", csv_level, "level for the poles table");
  exp->add_option("--out", csv_path, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) {
      bool seed_given = seed_opt->count() > 0;
      uint64_t chosen =
          seed_given ? seed : seed_from_env_or(kDefaultSeed);
      return cmd_build(state_path, depth, chosen, seed_given);
    }
    if (verify->parsed()) return cmd_verify(state_path, levels_spec, samples);
    if (render->parsed())
      return cmd_render(state_path, target, level, out_path);
    if (exp->parsed()) return cmd_export(state_path, table, csv_level, csv_path);
  } catch (const cantor::usage_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const cantor::verification_error& e) {
    std::fprintf(stderr, "verification failure: %s\n", e.what());
    return 1;
  } catch (const cantor::construction_error& e) {
    std::fprintf(stderr, "construction failure: %s\n", e.what());
    return 3;
  }
  return 2;
}
