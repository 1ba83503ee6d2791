#include "probkg/bench/suite.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "probkg/bench/generator.hpp"
#include "probkg/kg/pkg_format.hpp"
#include "probkg/query/evaluator.hpp"
#include "probkg/query/parser.hpp"
#include "probkg/query/results.hpp"
#include "probkg/util/error.hpp"

namespace probkg::bench {

using nlohmann::json;
using nlohmann::ordered_json;

std::int64_t VariantResult::median_ns() const {
  if (ns.empty()) return 0;
  auto v = ns;
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

namespace {

query::PatternPtr naive_simjoin(const query::PatternPtr& p) {
  using K = query::Pattern::Kind;
  if (!p) return p;
  switch (p->kind) {
    case K::Bgp: return p;
    case K::Filter: return query::make_filter(naive_simjoin(p->left), p->expr);
    case K::Bind: return query::make_bind(naive_simjoin(p->left), p->expr, p->var);
    case K::SimJoin: {
      // cross join + BIND(JSD(..)) + FILTER, with no SIMJOIN operator
      const std::string d = "jsd_" + p->var_a + "_" + p->var_b;
      auto joined = query::make_binary(K::Join, naive_simjoin(p->left), naive_simjoin(p->right));
      auto bound = query::make_bind(
          joined, query::make_call(query::Builtin::Jsd, {query::make_var(p->var_a), query::make_var(p->var_b)}), d);
      return query::make_filter(
          bound, query::make_binary_expr("<=", query::make_var(d), query::make_const(kg::make_number(p->theta))));
    }
    default: return query::make_binary(p->kind, naive_simjoin(p->left), naive_simjoin(p->right));
  }
}

bool has_kind(const query::PatternPtr& p, query::Pattern::Kind k) {
  if (!p) return false;
  return p->kind == k || has_kind(p->left, k) || has_kind(p->right, k);
}

bool expr_has_pgt(const query::ExprPtr& e) {
  if (!e) return false;
  if (e->kind == query::Expr::Kind::Call && e->builtin == query::Builtin::Pgt) return true;
  return std::any_of(e->args.begin(), e->args.end(), expr_has_pgt);
}

bool has_pgt(const query::PatternPtr& p) {
  if (!p) return false;
  return expr_has_pgt(p->expr) || has_pgt(p->left) || has_pgt(p->right);
}

std::vector<std::string> multiset(const query::ResultSet& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs.rows) out.push_back(query::answer_key(rs.vars, r.vals, *rs.terms));
  std::sort(out.begin(), out.end());
  return out;
}

double sym_diff_fraction(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> d;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(d));
  return static_cast<double>(d.size()) / static_cast<double>(std::max<std::size_t>(1, b.size()));
}

struct Loaded {
  kg::Graph graph;
  kg::Graph twin;
};

Loaded load_dataset(const json& d, const std::string& base_dir, std::uint64_t seed) {
  Loaded out;
  if (d.contains("file")) {
    std::filesystem::path p = d["file"].get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    out.graph = kg::load_graph_file(p.string());
    out.twin = make_twin(out.graph);
    return out;
  }
  GenConfig cfg;
  cfg.n_triples = d.value("n_triples", cfg.n_triples);
  cfg.k_components = d.value("k_components", cfg.k_components);
  cfg.frac_uncertain = d.value("frac_uncertain", cfg.frac_uncertain);
  cfg.n_entities = d.value("n_entities", cfg.n_entities);
  cfg.n_predicates = d.value("n_predicates", cfg.n_predicates);
  cfg.cluster_count = d.value("cluster_count", cfg.cluster_count);
  cfg.seed = d.value("seed", seed);
  auto ds = generate(cfg);
  out.graph = std::move(ds.graph);
  out.twin = std::move(ds.twin);
  return out;
}

}  // namespace

BenchReport run_suite(std::string_view config_json, const std::string& base_dir) {
  json cfg;
  try {
    cfg = json::parse(config_json);
  } catch (const json::exception& e) {
    fail(Errc::InvalidArgument, std::string("suite JSON: ") + e.what());
  }
  BenchReport report;
  try {
    report.runs = cfg.value("runs", std::size_t{7});
    report.warmups = cfg.value("warmups", std::size_t{2});
    if (report.runs == 0) fail(Errc::InvalidArgument, "runs must be at least 1");
    const std::uint64_t seed = cfg.value("seed", std::uint64_t{42});
    const bool lineage = cfg.value("lineage", false);
    const json variants = cfg.value("variants", json::object());
    const auto pushdowns = variants.value("pushdown", std::vector<bool>{true, false});
    const auto simjoins = variants.value("simjoin", std::vector<std::string>{"dedicated", "naive"});
    const auto samplings = variants.value("sampling", std::vector<std::string>{});
    const bool twin = variants.value("twin", true);

    std::map<std::string, Loaded> datasets;
    for (const auto& d : cfg.at("datasets")) datasets.emplace(d.at("name").get<std::string>(), load_dataset(d, base_dir, seed));

    for (const auto& q : cfg.at("queries")) {
      QueryReport qr;
      qr.name = q.at("name").get<std::string>();
      qr.dataset = q.at("dataset").get<std::string>();
      auto it = datasets.find(qr.dataset);
      if (it == datasets.end()) fail(Errc::InvalidArgument, "query " + qr.name + " names an unknown dataset");
      const auto& data = it->second;
      const auto ast = query::parse_query(q.at("text").get<std::string>());
      const bool simjoin = has_kind(ast.where, query::Pattern::Kind::SimJoin);

      struct Job {
        VariantResult v;
        query::QueryAst ast;
        const kg::Graph* g;
      };
      std::vector<Job> jobs;
      for (bool pd : pushdowns)
        for (const auto& sj : simjoins) {
          if (sj != "dedicated" && sj != "naive") fail(Errc::InvalidArgument, "unknown simjoin variant " + sj);
          if (sj == "naive" && !simjoin) continue;
          VariantResult v;
          v.pushdown = pd;
          v.simjoin = sj;
          v.name = std::string(pd ? "pushdown" : "no-pushdown") + "/" + sj;
          auto a = ast;
          if (sj == "naive") a.where = naive_simjoin(a.where);
          jobs.push_back({std::move(v), std::move(a), &data.graph});
        }
      if (has_pgt(ast.where))
        for (const auto& s : samplings) {
          VariantResult v;
          v.sampling = std::string(mc::strategy_name(mc::parse_strategy(s)));
          v.gated = false;
          v.name = "sampling/" + v.sampling;
          jobs.push_back({std::move(v), ast, &data.graph});
        }
      if (twin && q.contains("twin_text")) {
        VariantResult v;
        v.graph = "twin";
        v.gated = false;
        v.name = "twin";
        jobs.push_back({std::move(v), query::parse_query(q["twin_text"].get<std::string>()), &data.twin});
      }

      std::optional<std::vector<std::string>> reference;
      for (auto& job : jobs) {
        query::PlanOptions po;
        po.pushdown = job.v.pushdown;
        query::EvalOptions eo;
        eo.lineage = lineage;
        if (job.v.sampling != "closed") {
          query::SamplingMode sm;
          sm.config.strategy = mc::parse_strategy(job.v.sampling);
          sm.config.seed = seed;
          eo.sampling = sm;
        }
        auto once = [&] { return query::evaluate(query::plan(job.ast, *job.g, po), *job.g, eo); };
        for (std::size_t w = 0; w < report.warmups; ++w) once();
        query::ResultSet last;
        for (std::size_t r = 0; r < report.runs; ++r) {
          const auto t0 = std::chrono::steady_clock::now();
          last = once();
          const auto t1 = std::chrono::steady_clock::now();
          job.v.ns.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
        }
        job.v.results = last.rows.size();
        job.v.warnings = last.stats.warnings;
        job.v.simjoin_stats = last.stats.simjoin;
        const auto ms = multiset(last);
        if (job.v.gated) {
          if (!reference) reference = ms;
          else if (ms != *reference) qr.consistent = false;
        } else if (job.v.graph == "prob" && reference) {
          job.v.error = sym_diff_fraction(ms, *reference);
        }
        qr.variants.push_back(std::move(job.v));
      }

      auto find = [&](auto pred) -> const VariantResult* {
        for (const auto& v : qr.variants)
          if (pred(v)) return &v;
        return nullptr;
      };
      auto base = find([](const auto& v) { return v.gated && v.pushdown && v.simjoin == "dedicated"; });
      auto off = find([](const auto& v) { return v.gated && !v.pushdown && v.simjoin == "dedicated"; });
      auto naive = find([](const auto& v) { return v.gated && v.pushdown && v.simjoin == "naive"; });
      auto tw = find([](const auto& v) { return v.graph == "twin"; });
      auto ratio = [](const VariantResult* a, const VariantResult* b) {
        return static_cast<double>(a->median_ns()) / static_cast<double>(std::max<std::int64_t>(1, b->median_ns()));
      };
      if (qr.consistent && base) {
        if (off) qr.pushdown_speedup = ratio(off, base);
        if (naive) qr.simjoin_speedup = ratio(naive, base);
        if (tw) qr.overhead_ratio = ratio(base, tw);
      }
      report.queries.push_back(std::move(qr));
    }
  } catch (const json::exception& e) {
    fail(Errc::InvalidArgument, std::string("suite JSON: ") + e.what());
  }
  return report;
}

bool BenchReport::consistent() const {
  return std::all_of(queries.begin(), queries.end(), [](const auto& q) { return q.consistent; });
}

std::string BenchReport::to_json(bool timing) const {
  ordered_json j;
  j["runs"] = runs;
  j["warmups"] = warmups;
  j["queries"] = ordered_json::array();
  for (const auto& q : queries) {
    ordered_json jq;
    jq["name"] = q.name;
    jq["dataset"] = q.dataset;
    jq["status"] = q.consistent ? "ok" : "VariantMismatch";
    if (timing) {
      if (q.pushdown_speedup) jq["pushdown_speedup"] = *q.pushdown_speedup;
      if (q.simjoin_speedup) jq["simjoin_speedup"] = *q.simjoin_speedup;
      if (q.overhead_ratio) jq["overhead_ratio"] = *q.overhead_ratio;
    }
    jq["variants"] = ordered_json::array();
    for (const auto& v : q.variants) {
      ordered_json jv;
      jv["name"] = v.name;
      jv["pushdown"] = v.pushdown;
      jv["simjoin"] = v.simjoin;
      jv["sampling"] = v.sampling;
      jv["graph"] = v.graph;
      jv["results"] = v.results;
      jv["warnings"] = v.warnings;
      if (v.error) jv["error"] = *v.error;
      if (v.simjoin_stats.candidates) {
        jv["candidates"] = v.simjoin_stats.candidates;
        jv["pruned"] = v.simjoin_stats.pruned;
        jv["survivors"] = v.simjoin_stats.survivors;
        jv["matches"] = v.simjoin_stats.matches;
        jv["pruned_fraction"] = v.simjoin_stats.pruned_fraction();
      }
      if (timing && q.consistent) {
        jv["median_ns"] = v.median_ns();
        jv["min_ns"] = *std::min_element(v.ns.begin(), v.ns.end());
        jv["max_ns"] = *std::max_element(v.ns.begin(), v.ns.end());
      }
      jq["variants"].push_back(std::move(jv));
    }
    j["queries"].push_back(std::move(jq));
  }
  return j.dump(2);
}

std::string BenchReport::to_csv() const {
  std::ostringstream out;
  out << "query,dataset,status,variant,pushdown,simjoin,sampling,graph,results,warnings,median_ns,min_ns,max_ns,"
         "candidates,pruned,survivors,matches,error\n";
  for (const auto& q : queries)
    for (const auto& v : q.variants) {
      out << q.name << ',' << q.dataset << ',' << (q.consistent ? "ok" : "VariantMismatch") << ',' << v.name << ','
          << v.pushdown << ',' << v.simjoin << ',' << v.sampling << ',' << v.graph << ',' << v.results << ','
          << v.warnings << ',';
      if (q.consistent)
        out << v.median_ns() << ',' << *std::min_element(v.ns.begin(), v.ns.end()) << ','
            << *std::max_element(v.ns.begin(), v.ns.end());
      else
        out << ",,";
      out << ',' << v.simjoin_stats.candidates << ',' << v.simjoin_stats.pruned << ',' << v.simjoin_stats.survivors
          << ',' << v.simjoin_stats.matches << ',';
      if (v.error) out << *v.error;
      out << '\n';
    }
  return out.str();
}

BenchReport run_suite_file(const std::string& path, const std::string& out_dir) {
  std::ifstream in(path);
  if (!in) fail(Errc::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto report = run_suite(ss.str(), std::filesystem::path(path).parent_path().string());
  std::filesystem::create_directories(out_dir);
  std::ofstream(std::filesystem::path(out_dir) / "report.json") << report.to_json() << '\n';
  std::ofstream(std::filesystem::path(out_dir) / "report.csv") << report.to_csv();
  if (!report.consistent()) fail(Errc::VariantMismatch, "variants disagree; see report.json");
  return report;
}

}  // namespace probkg::bench
