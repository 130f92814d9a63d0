#pragma once

// CLI entry point: maps subcommands onto the library modules and writes
// JSON/CSV. Exit codes: 0 success, 2 criterion-violation warnings or failed
// validation checks, 1 errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "renact/convergence.hpp"
#include "renact/effective.hpp"
#include "renact/expansion.hpp"
#include "renact/geometry.hpp"
#include "renact/graphs.hpp"
#include "renact/interactions.hpp"
#include "renact/model.hpp"
#include "renact/oracle.hpp"
#include "renact/quadrature.hpp"
#include "renact/validate.hpp"

namespace renact::harness {

using nlohmann::json;

namespace detail {

inline json to_json(const mc::MCEstimate& e) {
  return json{{"value", e.value},
              {"stderr", e.stderr_},
              {"samples", e.samples},
              {"seed", e.seed}};
}

inline void emit(const json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    f << text;
  }
}

inline void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    f << text;
  }
}

struct ModelOpts {
  std::string model = "penetrable";
  double R = 1.0, r = 0.1, zr = 0.0, zR = 0.0;
  double L = 6.0;
  std::string boundary = "periodic";

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "penetrable|colloid")
        ->check(CLI::IsMember({"penetrable", "colloid"}));
    cmd->add_option("--R", R, "large radius");
    cmd->add_option("--r", r, "small radius");
    cmd->add_option("--zr", zr, "small-sphere activity");
    cmd->add_option("--zR", zR, "large-sphere activity");
    cmd->add_option("--L", L, "box side");
    cmd->add_option("--boundary", boundary, "periodic|free")
        ->check(CLI::IsMember({"periodic", "free"}));
  }

  model::MixtureParams params() const {
    model::MixtureParams p;
    p.R = R;
    p.r = r;
    p.zr = zr;
    p.zR = zR;
    p.model = model == "colloid" ? model::ModelKind::colloid
                                 : model::ModelKind::penetrable;
    p.box = {L,
             boundary == "free" ? geometry::Boundary::free_space
                                : geometry::Boundary::periodic,
             3};
    p.validate();
    return p;
  }

  json to_json() const {
    return json{{"model", model}, {"R", R},         {"r", r},
                {"zr", zr},       {"zR", zR},       {"L", L},
                {"boundary", boundary}};
  }
};

/// Regular simplex of k points with pairwise distance `dist`, centered in the
/// box (used by `effective w --k --dist`).
inline std::vector<model::Vec3> simplex_positions(int k, double dist, double L) {
  if (k < 2 || k > 4) throw std::invalid_argument("simplex_positions: k in 2..4");
  std::vector<model::Vec3> pts;
  const double c = L / 2.0;
  if (k == 2) {
    pts = {{c - dist / 2, c, c}, {c + dist / 2, c, c}};
  } else if (k == 3) {
    const double h = dist / std::sqrt(3.0);
    pts = {{c + h, c, c},
           {c - h / 2, c + dist / 2, c},
           {c - h / 2, c - dist / 2, c}};
  } else {
    const double s = dist / std::sqrt(2.0);
    pts = {{c + s / 2, c + s / 2, c + s / 2},
           {c + s / 2, c - s / 2, c - s / 2},
           {c - s / 2, c + s / 2, c - s / 2},
           {c - s / 2, c - s / 2, c + s / 2}};
  }
  return pts;
}

inline std::vector<double> parse_grid(const std::string& spec) {
  // lo:hi:count
  double lo = 0.0, hi = 0.0;
  int count = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(spec);
  if (!(is >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1)
    throw std::invalid_argument("grid spec must be lo:hi:count, got " + spec);
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return g;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args) {
  CLI::App app{"renact: renormalized-activity cluster expansions for binary sphere mixtures"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file; flags override");
  app.fallthrough();

  std::string out_path;
  app.add_option("--out", out_path, "output file (default stdout)");
  std::uint64_t seed = 42;
  app.add_option("--seed", seed, "RNG seed (recorded in every output)");
  int workers = 1;
  app.add_option("--workers", workers, "worker threads (never changes results)");

  int exit_code = 0;

  // ---- geometry ----------------------------------------------------------
  auto* geo = app.add_subcommand("geometry", "sphere-intersection geometry");
  geo->require_subcommand(1);
  {
    auto* ball = geo->add_subcommand("ball", "ball volume");
    auto radius = std::make_shared<double>(1.0);
    auto dim = std::make_shared<int>(3);
    ball->add_option("--radius", *radius);
    ball->add_option("--dim", *dim);
    ball->callback([=, &out_path]() {
      detail::emit(json{{"schema", 1},
                        {"command", "geometry ball"},
                        {"volume", geometry::ball_volume(*radius, *dim)}},
                   out_path);
    });

    auto* lens = geo->add_subcommand("lens", "equal-radius two-ball overlap");
    auto rho = std::make_shared<double>(1.1);
    auto dist = std::make_shared<double>(2.0);
    lens->add_option("--rho", *rho);
    lens->add_option("--dist", *dist);
    lens->callback([=, &out_path]() {
      detail::emit(json{{"schema", 1},
                        {"command", "geometry lens"},
                        {"volume", geometry::lens_volume(*rho, *dist)}},
                   out_path);
    });

    auto* corona = geo->add_subcommand("corona", "depletion-shell volume");
    auto R = std::make_shared<double>(1.0);
    auto rr = std::make_shared<double>(0.1);
    corona->add_option("--R", *R);
    corona->add_option("--r", *rr);
    corona->callback([=, &out_path]() {
      detail::emit(json{{"schema", 1},
                        {"command", "geometry corona"},
                        {"volume", geometry::corona_volume(*R, *rr)},
                        {"epsilon", geometry::epsilon_shell(*rr / *R)}},
                   out_path);
    });

    auto* kvol = geo->add_subcommand("kvol", "k-ball intersection volume (MC)");
    auto balls_raw = std::make_shared<std::vector<std::string>>();
    auto samples = std::make_shared<std::uint64_t>(1u << 18);
    auto periodic_L = std::make_shared<double>(0.0);
    kvol->add_option("--ball", *balls_raw, "x,y,z,radius (repeat per ball)")->required();
    kvol->add_option("--samples", *samples);
    kvol->add_option("--periodic-L", *periodic_L, "periodic box side (0 = free)");
    kvol->callback([=, &out_path, &seed, &workers]() {
      std::vector<geometry::BallSpec> balls;
      for (const auto& s : *balls_raw) {
        geometry::BallSpec b;
        double x, y, z, rad;
        char c;
        std::istringstream is(s);
        if (!(is >> x >> c >> y >> c >> z >> c >> rad))
          throw std::invalid_argument("bad --ball spec: " + s);
        b.center = {x, y, z};
        b.radius = rad;
        balls.push_back(b);
      }
      geometry::KIntersectOptions opt;
      opt.samples = *samples;
      opt.seed = seed;
      opt.workers = workers;
      if (*periodic_L > 0.0) opt.periodic_L = *periodic_L;
      detail::emit(json{{"schema", 1},
                        {"command", "geometry kvol"},
                        {"volume", detail::to_json(geometry::k_intersection_volume(balls, opt))}},
                   out_path);
    });
  }

  // ---- graphs ------------------------------------------------------------
  auto* gr = app.add_subcommand("graphs", "enumeration and partition scheme");
  gr->require_subcommand(1);
  {
    auto* count = gr->add_subcommand("count", "count a graph class");
    auto n = std::make_shared<int>(3);
    auto cls = std::make_shared<std::string>("connected");
    auto m = std::make_shared<int>(2);
    auto r = std::make_shared<int>(1);
    count->add_option("--n", *n, "vertex count (connected/trees)");
    count->add_option("--class", *cls,
                      "connected|trees|star-all|star-connected|star-trees|hypergraphs")
        ->check(CLI::IsMember({"connected", "trees", "star-all", "star-connected",
                               "star-trees", "hypergraphs"}));
    count->add_option("--m", *m, "star count (star classes)");
    count->add_option("--r", *r, "cloud count (star classes)");
    count->callback([=, &out_path]() {
      std::uint64_t c = 0;
      if (*cls == "connected") c = graphs::count_connected(*n);
      else if (*cls == "trees") c = graphs::enumerate_trees(*n).size();
      else if (*cls == "star-all")
        c = graphs::enumerate_bipartite_star(*m, *r, graphs::StarClass::all).size();
      else if (*cls == "star-connected")
        c = graphs::enumerate_bipartite_star(*m, *r, graphs::StarClass::connected).size();
      else if (*cls == "star-trees")
        c = graphs::enumerate_bipartite_star(*m, *r, graphs::StarClass::trees).size();
      else c = graphs::enumerate_connected_hypergraphs(*m).size();
      json j{{"schema", 1}, {"command", "graphs count"}, {"class", *cls}, {"count", c}};
      if (cls->rfind("star", 0) == 0 || *cls == "hypergraphs") {
        j["m"] = *m;
        if (cls->rfind("star", 0) == 0) j["r"] = *r;
      } else {
        j["n"] = *n;
      }
      detail::emit(j, out_path);
    });

    auto* part = gr->add_subcommand("partition-check", "tree partition-scheme check");
    auto pn = std::make_shared<int>(4);
    part->add_option("--n", *pn)->required();
    part->callback([=, &out_path, &exit_code]() {
      const auto rep = graphs::partition_check(*pn);
      detail::emit(json{{"schema", 1},
                        {"command", "graphs partition-check"},
                        {"n", rep.n},
                        {"connected_count", rep.connected_count},
                        {"interval_sum_2_pow_eprime", rep.interval_sum},
                        {"unique_interval", rep.every_graph_in_unique_interval},
                        {"kruskal_matches", rep.kruskal_matches_interval},
                        {"pass", rep.pass()}},
                   out_path);
      if (!rep.pass()) exit_code = 2;
    });
  }

  // ---- effective ---------------------------------------------------------
  auto* eff = app.add_subcommand("effective", "effective activities and potentials");
  eff->require_subcommand(1);
  {
    auto* zhat = eff->add_subcommand("zhat", "effective activity");
    auto mo = std::make_shared<detail::ModelOpts>();
    mo->attach(zhat);
    auto mode = std::make_shared<std::string>("exact");
    auto nmax = std::make_shared<int>(2);
    auto samples = std::make_shared<std::uint64_t>(1u << 17);
    auto pos = std::make_shared<std::string>("");
    zhat->add_option("--mode", *mode, "exact|series|ratio")
        ->check(CLI::IsMember({"exact", "series", "ratio"}));
    zhat->add_option("--nmax", *nmax, "cloud-size truncation (series)");
    zhat->add_option("--samples", *samples);
    zhat->add_option("--x", *pos, "position x,y,z (ratio mode, free boundary)");
    zhat->callback([=, &out_path, &seed]() {
      const auto params = mo->params();
      effective::EffectiveActivity z;
      if (*mode == "exact") {
        z = effective::zhat_penetrable(params);
      } else if (*mode == "series") {
        effective::ZhatSeriesOptions o;
        o.n_max = *nmax;
        o.samples = *samples;
        o.seed = seed;
        z = effective::zhat_colloid_series(params, o);
      } else {
        model::Vec3 x{params.box.side / 2, params.box.side / 2, params.box.side / 2};
        if (!pos->empty()) {
          char c;
          std::istringstream is(*pos);
          if (!(is >> x[0] >> c >> x[1] >> c >> x[2]))
            throw std::invalid_argument("bad --x spec: " + *pos);
        }
        effective::ZhatRatioOptions o;
        o.samples = *samples;
        o.seed = seed;
        z = effective::zhat_finite_volume_ratio(params, x, o);
      }
      detail::emit(json{{"schema", 1},
                        {"command", "effective zhat"},
                        {"params", mo->to_json()},
                        {"mode", *mode},
                        {"seed", seed},
                        {"zhat", {{"value", z.value},
                                  {"stderr", z.stderr_},
                                  {"exponent", z.exponent},
                                  {"truncation_tail_warning", z.truncation_tail_warning}}}},
                   out_path);
    });

    auto* w = eff->add_subcommand("w", "effective multi-body potential W_k");
    auto mo2 = std::make_shared<detail::ModelOpts>();
    mo2->attach(w);
    auto k = std::make_shared<int>(2);
    auto dist = std::make_shared<double>(2.0);
    auto wmode = std::make_shared<std::string>("penetrable");
    auto kmax = std::make_shared<int>(3);
    auto wsamples = std::make_shared<std::uint64_t>(1u << 17);
    w->add_option("--k", *k, "number of large spheres (2..4)");
    w->add_option("--dist", *dist, "pairwise distance (regular simplex)");
    w->add_option("--mode", *wmode, "penetrable|cloud")
        ->check(CLI::IsMember({"penetrable", "cloud"}));
    w->add_option("--kmax", *kmax, "cloud-size truncation (cloud mode)");
    w->add_option("--samples", *wsamples);
    w->callback([=, &out_path, &seed, &workers]() {
      const auto params = mo2->params();
      const auto xs = detail::simplex_positions(*k, *dist, params.box.side);
      effective::EffectivePotentialValue v;
      if (*wmode == "penetrable")
        v = effective::w_J_penetrable(xs, params, *wsamples, seed, workers);
      else
        v = effective::w_J_cloud_series(xs, params, *kmax, *wsamples, seed, workers);
      detail::emit(json{{"schema", 1},
                        {"command", "effective w"},
                        {"params", mo2->to_json()},
                        {"k", *k},
                        {"dist", *dist},
                        {"mode", *wmode},
                        {"W", {{"value", v.value},
                               {"stderr", v.stderr_},
                               {"samples", v.samples},
                               {"seed", v.seed},
                               {"truncation_tail_warning", v.truncation_tail_warning}}}},
                   out_path);
    });
  }

  // ---- coeff -------------------------------------------------------------
  auto* coeff = app.add_subcommand("coeff", "cluster coefficients");
  coeff->require_subcommand(1);
  {
    const auto add_bm_like = [&](const char* name, bool derivative) {
      auto* cmd = coeff->add_subcommand(name, derivative
                                                  ? "d b_m / d z_r (rooted hypergraphs)"
                                                  : "cluster coefficient b_m");
      auto mo = std::make_shared<detail::ModelOpts>();
      mo->attach(cmd);
      auto m = std::make_shared<int>(2);
      auto samples = std::make_shared<std::uint64_t>(1u << 18);
      cmd->add_option("--m", *m, "order (1..4)");
      cmd->add_option("--samples", *samples);
      cmd->callback([=, &out_path, &seed, &workers]() {
        const auto params = mo->params();
        expansion::BmOptions bo;
        bo.samples = *samples;
        bo.seed = seed;
        bo.workers = workers;
        const auto b = derivative ? expansion::db_m_dzr(*m, params, bo)
                                  : expansion::b_m(*m, params, bo);
        detail::emit(json{{"schema", 1},
                          {"command", std::string("coeff ") + name},
                          {"params", mo->to_json()},
                          {"m", b.m},
                          {"estimate", b.estimate},
                          {"stderr", b.stderr_},
                          {"samples", b.samples},
                          {"seed", b.seed},
                          {"truncation_tail_warning", b.truncation_tail_warning}},
                     out_path);
      });
    };
    add_bm_like("bm", false);
    add_bm_like("dbm", true);
  }

  // ---- pressure / density --------------------------------------------------
  const auto add_series_cmd = [&](const char* name) {
    auto* cmd = app.add_subcommand(name, std::string(name) == "pressure"
                                             ? "pressure series in zhat"
                                             : "density series in zhat");
    auto mo = std::make_shared<detail::ModelOpts>();
    mo->attach(cmd);
    auto M = std::make_shared<int>(3);
    auto samples = std::make_shared<std::uint64_t>(1u << 18);
    auto force = std::make_shared<bool>(false);
    auto species = std::make_shared<std::string>("large");
    auto format = std::make_shared<std::string>("json");
    cmd->add_option("--M", *M, "truncation order");
    cmd->add_option("--samples", *samples);
    cmd->add_flag("--force", *force, "compute even outside the convergence region");
    cmd->add_option("--format", *format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    if (std::string(name) == "density")
      cmd->add_option("--species", *species, "large|small")
          ->check(CLI::IsMember({"large", "small"}));
    cmd->callback([=, &out_path, &seed, &workers, &exit_code]() {
      const auto params = mo->params();
      expansion::SeriesOptions so;
      so.M = *M;
      so.bm.samples = *samples;
      so.bm.seed = seed;
      so.bm.workers = workers;
      so.force = true;  // gate reported below; exit code carries the warning
      expansion::SeriesResult res;
      std::string cmd_name = name;
      if (cmd_name == "pressure") res = expansion::pressure_series(params, so);
      else if (*species == "large") res = expansion::rho_R(params, so);
      else res = expansion::rho_r(params, so);
      if (!res.criterion_satisfied && !*force) {
        detail::emit(json{{"schema", 1},
                          {"command", cmd_name},
                          {"error", "activities outside the convergence region"},
                          {"zhat", res.zhat},
                          {"admissible_zhat", res.criterion_bound},
                          {"seed", seed},
                          {"hint", "pass --force to compute anyway"}},
                     out_path);
        exit_code = 2;
        return;
      }
      if (*format == "csv") {
        std::ostringstream csv;
        csv << "m,coefficient,coeff_stderr,term,term_stderr\n";
        for (const auto& t : res.terms)
          csv << t.m << ',' << t.coefficient << ',' << t.coeff_stderr << ','
              << t.value << ',' << t.value_stderr << '\n';
        detail::emit_text(csv.str(), out_path);
      } else {
        json terms = json::array();
        for (const auto& t : res.terms)
          terms.push_back(json{{"m", t.m},
                               {"coefficient", t.coefficient},
                               {"coeff_stderr", t.coeff_stderr},
                               {"term", t.value},
                               {"term_stderr", t.value_stderr}});
        json j{{"schema", 1},
               {"command", cmd_name},
               {"params", mo->to_json()},
               {"seed", seed},
               {"zhat", res.zhat},
               {"terms", terms},
               {"total", res.total},
               {"total_stderr", res.total_stderr},
               {"criterion_satisfied", res.criterion_satisfied},
               {"admissible_zhat", res.criterion_bound},
               {"majorant_lhs", res.majorant_lhs},
               {"majorant_rhs", res.majorant_rhs},
               {"truncation_tail_warning", res.truncation_tail_warning}};
        if (cmd_name == "pressure") {
          j["solvent_term"] = res.solvent_term;
          j["pressure"] = res.pressure;
        }
        detail::emit(j, out_path);
      }
      if (!res.criterion_satisfied) exit_code = 2;
    });
  };
  add_series_cmd("pressure");
  add_series_cmd("density");

  // ---- convergence ---------------------------------------------------------
  auto* conv = app.add_subcommand("convergence", "sufficient-criterion checks");
  conv->require_subcommand(1);
  {
    auto* check = conv->add_subcommand("check", "evaluate one criterion");
    auto mo = std::make_shared<detail::ModelOpts>();
    mo->attach(check);
    auto criterion = std::make_shared<std::string>("easy");
    auto zhat = std::make_shared<double>(0.0);
    auto zhat_given = std::make_shared<bool>(false);
    auto a = std::make_shared<double>(0.0);
    auto A = std::make_shared<double>(0.0);
    auto b = std::make_shared<double>(0.0);
    auto c = std::make_shared<double>(0.0);
    check->add_option("--criterion", *criterion, "col1|easy|kp|hsper|hs|witness")
        ->check(CLI::IsMember({"col1", "easy", "kp", "hsper", "hs", "witness"}));
    check->add_option("--zhat", *zhat)->each([=](const std::string&) { *zhat_given = true; });
    check->add_option("--a", *a);
    check->add_option("--A", *A);
    check->add_option("--b", *b);
    check->add_option("--c", *c);
    check->callback([=, &out_path, &seed, &exit_code]() {
      const auto params = mo->params();
      const double zh = *zhat_given ? *zhat
                        : params.ideal_solvent()
                            ? effective::zhat_penetrable(params).value
                            : params.zR;
      json j{{"schema", 1},
             {"command", "convergence check"},
             {"criterion", *criterion},
             {"params", mo->to_json()},
             {"seed", seed},
             {"zhat", zh}};
      bool satisfied = true;
      if (*criterion == "easy") {
        const auto e = convergence::max_zhat_easy(params);
        satisfied = zh <= e.zhat_bound;
        j["admissible_zhat"] = e.zhat_bound;
        j["admissible_zR"] = e.zR_bound;
        j["witness"] = {{"a", e.witness_a}, {"A", e.witness_A}};
      } else if (*criterion == "kp") {
        const double bound = convergence::max_zR_kp(params);
        satisfied = params.zR <= bound;
        j["admissible_zR"] = bound;
      } else if (*criterion == "col1") {
        const auto w = convergence::check_col1(params, zh, *a, *A);
        satisfied = w.satisfied;
        j["admissible_zhat"] = w.admissible_zhat;
        j["constants"] = w.constants;
      } else if (*criterion == "hsper" || *criterion == "hs") {
        const auto w = convergence::check_hs(params, zh, *a, *b, *c, *criterion == "hs");
        satisfied = w.satisfied;
        j["admissible_zhat"] = w.admissible_zhat;
        j["constants"] = w.constants;
      } else {  // witness
        const auto w = convergence::witness_search_hs(params, zh);
        satisfied = w.satisfied;
        j["constants"] = w.constants;
        j["admissible_zhat"] = w.admissible_zhat;
        j["precondition_failed"] = w.precondition_failed;
        if (!w.note.empty()) j["note"] = w.note;
      }
      j["satisfied"] = satisfied;
      detail::emit(j, out_path);
      if (!satisfied) exit_code = 2;
    });

    auto* sweep = conv->add_subcommand("sweep", "tabulate bounds over a z_r grid");
    auto mo2 = std::make_shared<detail::ModelOpts>();
    mo2->attach(sweep);
    auto grid = std::make_shared<std::string>("0:0.2:41");
    auto criteria = std::make_shared<std::string>("easy,kp");
    sweep->add_option("--zr-grid", *grid, "lo:hi:count");
    sweep->add_option("--criteria", *criteria, "comma list: easy,kp[,pair]");
    sweep->callback([=, &out_path]() {
      const auto params = mo2->params();
      const bool with_pair = criteria->find("pair") != std::string::npos;
      const auto rows = convergence::region_sweep(params, detail::parse_grid(*grid), with_pair);
      std::ostringstream csv;
      csv << "zr,R,r,zhat_easy,zR_easy,zR_kp,ratio";
      if (with_pair) csv << ",zR_pair_nonrigorous";
      csv << "\n";
      csv.precision(12);
      for (const auto& row : rows) {
        csv << row.zr << ',' << row.R << ',' << row.r << ',' << row.zhat_easy << ','
            << row.zR_easy << ',' << row.zR_kp << ',' << row.ratio;
        if (with_pair) csv << ',' << row.zR_pair;
        csv << '\n';
      }
      detail::emit_text(csv.str(), out_path);
    });
  }

  // ---- validate ------------------------------------------------------------
  auto* val = app.add_subcommand("validate", "oracle identities and the acceptance battery");
  val->require_subcommand(1);
  {
    auto* orc = val->add_subcommand("oracle", "desk-case oracle cross-check");
    auto mo = std::make_shared<detail::ModelOpts>();
    mo->zr = 0.05;
    mo->zR = 0.003;
    mo->attach(orc);
    auto n1max = std::make_shared<int>(6);
    auto n2max = std::make_shared<int>(40);
    auto samples = std::make_shared<std::uint64_t>(200000);
    auto M = std::make_shared<int>(3);
    auto bm_samples = std::make_shared<std::uint64_t>(1u << 19);
    orc->add_option("--n1max", *n1max);
    orc->add_option("--n2max", *n2max);
    orc->add_option("--samples", *samples);
    orc->add_option("--M", *M);
    orc->add_option("--bm-samples", *bm_samples);
    orc->callback([=, &out_path, &seed, &workers, &exit_code]() {
      const auto params = mo->params();
      oracle::OracleConfig cfg;
      cfg.n1_max = *n1max;
      cfg.n2_max = *n2max;
      cfg.samples_per_term = *samples;
      cfg.seed = seed;
      cfg.workers = workers;
      expansion::SeriesOptions so;
      so.M = *M;
      so.bm.samples = *bm_samples;
      so.bm.seed = mc::substream_seed(seed, 88);
      so.bm.workers = workers;
      const auto rows = validate::oracle_crosscheck(params, cfg, so);
      json jrows = json::array();
      bool all = true;
      for (const auto& r : rows) {
        jrows.push_back(json{{"identity", r.name},
                             {"lhs", r.lhs},
                             {"lhs_stderr", r.lhs_stderr},
                             {"rhs", r.rhs},
                             {"rhs_stderr", r.rhs_stderr},
                             {"sigmas", r.sigmas},
                             {"pass", r.pass}});
        all = all && r.pass;
      }
      detail::emit(json{{"schema", 1},
                        {"command", "validate oracle"},
                        {"params", mo->to_json()},
                        {"seed", seed},
                        {"identities", jrows},
                        {"pass", all}},
                   out_path);
      if (!all) exit_code = 2;
    });

    auto* all_cmd = val->add_subcommand("all", "full acceptance battery");
    auto scale = std::make_shared<double>(1.0);
    all_cmd->add_option("--scale", *scale, "sample-budget scale factor");
    all_cmd->callback([=, &out_path, &seed, &workers, &exit_code]() {
      validate::ValidateOptions vo;
      vo.seed = seed;
      vo.workers = workers;
      vo.samples_scale = *scale;
      const auto report = validate::run_acceptance(vo, /*print_lines=*/true);
      json jrows = json::array();
      for (const auto& r : report.results)
        jrows.push_back(json{{"id", r.id},
                             {"name", r.name},
                             {"pass", r.pass},
                             {"seconds", r.seconds},
                             {"details", r.details}});
      detail::emit(json{{"schema", 1},
                        {"command", "validate all"},
                        {"seed", seed},
                        {"criteria", jrows},
                        {"pass", report.all_pass()}},
                   out_path);
      if (!report.all_pass()) exit_code = 2;
    });
  }

  // ---- parse & dispatch -----------------------------------------------------
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return exit_code;
}

}  // namespace renact::harness
