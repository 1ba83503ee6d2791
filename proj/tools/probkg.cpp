// probkg command-line tool. Machine output goes to stdout as JSON lines (or
// tab-separated text with --format text); diagnostics go to stderr.
// Exit codes: 0 ok, 1 usage, 2 data error, 3 timeout.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "probkg/bench/suite.hpp"
#include "probkg/circuits/dimacs.hpp"
#include "probkg/circuits/inference.hpp"
#include "probkg/geo/boxes.hpp"
#include "probkg/kg/pkg_format.hpp"
#include "probkg/oracle/oracle.hpp"
#include "probkg/query/parser.hpp"
#include "probkg/util/error.hpp"
#include "probkg/util/parallel.hpp"

using namespace probkg;
using nlohmann::ordered_json;

namespace {

struct Globals {
  std::uint64_t seed = 42;
  std::size_t threads = 0;
  std::string format = "json";
} globals;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::Io, "cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string query_text(const std::string& q) {
  if (q != "-") return q;
  return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
}

void emit(const ordered_json& j) {
  if (globals.format == "json") {
    std::cout << j.dump() << '\n';
    return;
  }
  // text: values of a flat object, tab separated; nested objects flattened one level
  bool first = true;
  for (const auto& [k, v] : j.items()) {
    if (v.is_object()) {
      for (const auto& [k2, v2] : v.items()) {
        std::cout << (first ? "" : "\t") << k2 << '=' << (v2.is_string() ? v2.get<std::string>() : v2.dump());
        first = false;
      }
      continue;
    }
    std::cout << (first ? "" : "\t") << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump());
    first = false;
  }
  std::cout << '\n';
}

ordered_json bindings(const std::vector<std::string>& vars, const std::vector<kg::TermId>& vals,
                      const query::TermTable& terms) {
  ordered_json b = ordered_json::object();
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vals[i] != kg::kNoTerm) b[vars[i]] = kg::display_value(terms.term(vals[i]));
  return b;
}

int cmd_load(const std::string& file) {
  const auto g = kg::load_graph_file(file);
  const auto s = g.stats();
  ordered_json j;
  j["triples"] = s.triples;
  j["distinct_terms"] = s.distinct_terms;
  j["dist_literals"] = s.dist_literals;
  j["uncertain_triples"] = s.uncertain_triples;
  j["dist_by_family"] = ordered_json::object();
  for (const auto& [f, n] : s.dist_by_family) j["dist_by_family"][f] = n;
  emit(j);
  return 0;
}

struct QueryFlags {
  std::string file, q, strategy, method = "auto", bn;
  bool prob = false, no_pushdown = false, explain = false;
};

int cmd_query(const QueryFlags& f) {
  const auto g = kg::load_graph_file(f.file);
  const auto ast = query::parse_query(query_text(f.q));
  query::PlanOptions po;
  po.pushdown = !f.no_pushdown;
  const auto plan = query::plan(ast, g, po);
  if (f.explain) emit(ordered_json{{"explain", query::explain(plan)}});

  if (f.prob) {
    if (!f.strategy.empty()) fail(Errc::InvalidArgument, "--strategy cannot be combined with --prob");
    circuits::InferOptions io;
    io.plan = po;
    io.method = f.method == "lifted" ? circuits::Method::Lifted
                : f.method == "compiled" ? circuits::Method::Compiled
                                         : circuits::Method::Auto;
    std::optional<circuits::BayesNet> bn;
    if (!f.bn.empty()) {
      bn = circuits::parse_bayesnet(read_file(f.bn));
      io.bn = &*bn;
    }
    const auto inf = circuits::infer(ast, g, io);
    if (f.explain && !inf.safe.reason.empty()) emit(ordered_json{{"safe_plan", inf.safe.reason}});
    else if (f.explain && inf.safe.safe) emit(ordered_json{{"safe_plan", circuits::to_string(inf.safe.root)}});
    for (const auto& a : inf.answers) {
      ordered_json j;
      j["bindings"] = bindings(inf.results.vars, a.vals, *inf.results.terms);
      j["probability"] = *a.probability;
      j["method"] = inf.method;
      if (f.explain && a.lineage) j["lineage"] = prov::to_string(a.lineage);
      emit(j);
    }
    return 0;
  }
  query::EvalOptions eo;
  eo.lineage = f.explain;
  if (!f.strategy.empty()) {
    query::SamplingMode sm;
    sm.config.strategy = mc::parse_strategy(f.strategy);
    sm.config.seed = globals.seed;
    eo.sampling = sm;
  }
  const auto rs = query::evaluate(plan, g, eo);
  for (const auto& r : rs.rows) {
    ordered_json j;
    j["bindings"] = bindings(rs.vars, r.vals, *rs.terms);
    if (r.lineage) j["lineage"] = prov::to_string(r.lineage);
    emit(j);
  }
  if (rs.stats.warnings) std::cerr << "warning: " << rs.stats.warnings << " expression errors treated as false\n";
  return 0;
}

int cmd_compile(const std::string& input, const std::string& graph_file, const std::string& dimacs_file,
                double default_p) {
  circuits::CompileOptions co;
  auto report = [&](const circuits::BoolFormula& f, const circuits::Weights& w, ordered_json j) {
    circuits::CompileStats st;
    const auto c = circuits::compile(f, co, &st);
    const auto v = circuits::verify_circuit(c);
    j["nodes"] = c.size();
    j["decisions"] = st.decisions;
    j["verified"] = v.ok;
    j["wmc"] = circuits::wmc(c, w);
    j["circuit"] = circuits::export_circuit(c);
    emit(j);
  };
  if (!dimacs_file.empty()) {
    const auto cnf = circuits::read_dimacs(read_file(dimacs_file));
    report(circuits::cnf_to_formula(cnf), cnf.weights, ordered_json::object());
    return 0;
  }
  if (!graph_file.empty()) {
    const auto g = kg::load_graph_file(graph_file);
    const auto ast = query::parse_query(query_text(input));
    const auto rs = query::evaluate(query::plan(ast, g), g);
    for (const auto& a : query::distinct_answers(rs)) {
      const auto f = prov::to_boolean(a.lineage);
      ordered_json j;
      j["bindings"] = bindings(rs.vars, a.vals, *rs.terms);
      j["lineage"] = prov::to_string(a.lineage);
      report(f, circuits::tid_weights(circuits::variables(f), g), std::move(j));
    }
    return 0;
  }
  const auto f = circuits::parse_formula(input);
  circuits::Weights w;
  for (auto v : circuits::variables(f)) w[v] = {default_p, 1.0 - default_p};
  ordered_json j;
  j["formula"] = circuits::to_string(f);
  report(f, w, std::move(j));
  return 0;
}

int cmd_oracle(const std::string& file, const std::string& q, const std::string& bn_file) {
  const auto g = kg::load_graph_file(file);
  const auto ast = query::parse_query(query_text(q));
  const auto rep = bn_file.empty() ? oracle::enumerate_worlds(g, ast)
                                   : oracle::enumerate_worlds(g, ast, circuits::parse_bayesnet(read_file(bn_file)));
  for (const auto& [key, a] : rep.answers) {
    ordered_json j;
    j["bindings"] = ordered_json::object();
    for (std::size_t i = 0; i < rep.vars.size(); ++i)
      if (!a.bindings[i].empty()) j["bindings"][rep.vars[i]] = a.bindings[i];
    j["probability"] = a.probability;
    emit(j);
  }
  std::cerr << "worlds evaluated: " << rep.worlds_evaluated << "\n";
  return 0;
}

int cmd_bench(const std::string& suite, const std::string& out) {
  const auto rep = bench::run_suite_file(suite, out);
  for (const auto& q : rep.queries) {
    ordered_json j;
    j["query"] = q.name;
    j["status"] = q.consistent ? "ok" : "VariantMismatch";
    if (q.pushdown_speedup) j["pushdown_speedup"] = *q.pushdown_speedup;
    if (q.simjoin_speedup) j["simjoin_speedup"] = *q.simjoin_speedup;
    if (q.overhead_ratio) j["overhead_ratio"] = *q.overhead_ratio;
    emit(j);
  }
  return 0;
}

int cmd_fit(const std::string& axioms_file, std::size_t dim, geo::FitOptions opts, const std::string& out) {
  const auto axioms = geo::parse_axioms(read_file(axioms_file));
  opts.seed = globals.seed;
  const auto r = geo::fit(axioms, dim, opts);
  const auto doc = geo::space_to_json(r.space);
  if (!out.empty()) std::ofstream(out) << doc << '\n';
  ordered_json j;
  j["iterations"] = r.loss.size();
  j["loss"] = r.loss.empty() ? geo::loss(r.space, axioms) : r.loss.back();
  j["space"] = ordered_json::parse(doc);
  emit(j);
  for (const auto& a : axioms) {
    ordered_json row;
    row["c"] = a.c;
    row["d"] = a.d;
    row["target"] = a.p;
    row["fitted"] = geo::cond_prob(r.space, a.c, a.d);
    emit(row);
  }
  return 0;
}

int exit_code(Errc e) {
  switch (e) {
    case Errc::Timeout: return 3;
    default: return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probkg: probabilistic knowledge graph engine"};
  app.require_subcommand(1);
  app.add_option("--seed", globals.seed, "Root seed for sampling and fitting");
  app.add_option("--threads", globals.threads, "Worker threads (0 = all cores)");
  app.add_option("--format", globals.format, "Output format")->check(CLI::IsMember({"json", "text"}));

  std::string file;
  auto* load = app.add_subcommand("load", "Validate a .pkg file and print statistics");
  load->add_option("file", file, "Graph file")->required();

  QueryFlags qf;
  auto* query = app.add_subcommand("query", "Evaluate a query");
  query->add_option("file", qf.file, "Graph file")->required();
  query->add_option("-q,--query", qf.q, "Query text, or - for stdin")->required();
  query->add_flag("--prob", qf.prob, "Add answer probabilities (safe plan or compilation)");
  query->add_flag("--no-pushdown", qf.no_pushdown, "Keep filters where they are written");
  query->add_option("--strategy", qf.strategy, "Decide PGT thresholds by sampling")
      ->check(CLI::IsMember({"naive", "stratified", "sprt", "cascade"}));
  query->add_option("--method", qf.method, "Inference method for --prob")
      ->check(CLI::IsMember({"auto", "lifted", "compiled"}));
  query->add_option("--bn", qf.bn, "Bayesian network JSON correlating triples");
  query->add_flag("--explain", qf.explain, "Print the plan and per-answer lineage");

  std::string formula, graph_file, dimacs_file;
  double default_p = 0.5;
  auto* compile = app.add_subcommand("compile", "Compile a formula, query lineage or CNF to d-DNNF");
  auto* fopt = compile->add_option("-f,--formula", formula, "Formula, or a query when --graph is given");
  compile->add_option("--graph", graph_file, "Graph file; -f is then a query");
  auto* dopt = compile->add_option("--dimacs", dimacs_file, "Weighted DIMACS CNF file");
  compile->add_option("--p", default_p, "Literal probability for formula input")->check(CLI::Range(0.0, 1.0));
  fopt->excludes(dopt);

  std::string oq, obn;
  auto* orc = app.add_subcommand("oracle", "Brute-force possible-world enumeration");
  orc->add_option("file", file, "Graph file")->required();
  orc->add_option("-q,--query", oq, "Query text, or - for stdin")->required();
  orc->add_option("--bn", obn, "Bayesian network JSON correlating triples");

  std::string suite, out_dir = ".";
  auto* bench = app.add_subcommand("bench", "Run a benchmark suite");
  bench->add_option("suite", suite, "Suite JSON")->required();
  bench->add_option("-o,--out", out_dir, "Directory for report.json and report.csv");

  std::string axioms, space_out;
  std::size_t dim = 2;
  geo::FitOptions fo;
  auto* fitc = app.add_subcommand("fit-boxes", "Fit box embeddings to statistical axioms");
  fitc->add_option("axioms", axioms, "Axiom file")->required();
  fitc->add_option("-d,--dim", dim, "Embedding dimension")->required()->check(CLI::PositiveNumber);
  fitc->add_option("--iters", fo.iters, "Gradient steps");
  fitc->add_option("--lr", fo.lr, "Initial learning rate");
  fitc->add_option("--tau", fo.tau, "Softness temperature");
  fitc->add_option("-o,--out", space_out, "Write the fitted space JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  set_thread_count(globals.threads);

  try {
    if (*load) return cmd_load(file);
    if (*query) return cmd_query(qf);
    if (*compile) {
      if (formula.empty() && dimacs_file.empty()) {
        std::cerr << "compile: one of -f or --dimacs is required\n";
        return 1;
      }
      return cmd_compile(formula, graph_file, dimacs_file, default_p);
    }
    if (*orc) return cmd_oracle(file, oq, obn);
    if (*bench) return cmd_bench(suite, out_dir);
    if (*fitc) return cmd_fit(axioms, dim, fo, space_out);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what();
    if (e.line()) std::cerr << " (line " << e.line() << (e.col() ? ", col " + std::to_string(e.col()) : "") << ")";
    std::cerr << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
