#include "logpi1/cli.hpp"

#include "logpi1/bar.hpp"
#include "logpi1/cdga.hpp"
#include "logpi1/curve_monodromy.hpp"
#include "logpi1/minimal.hpp"
#include "logpi1/nilpotent_lie.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace logpi1::cli {

using exactlin::Index;

namespace {

using nlohmann::json;

json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::string dims_line(const std::vector<Index>& dims) {
  std::ostringstream os;
  for (size_t i = 0; i < dims.size(); ++i) os << (i ? " " : "") << dims[i];
  return os.str();
}

void emit(const json& report, const std::string& out_path, const std::string& format,
          const std::string& summary, std::ostream& os) {
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw std::invalid_argument("cannot write '" + out_path + "'");
    f << report.dump(2) << "\n";
  }
  if (format == "json")
    os << report.dump(2) << "\n";
  else
    os << summary;
}

std::string key(int p, int q) { return std::to_string(p) + "," + std::to_string(q); }

struct Options {
  std::string file;
  std::string out;
  std::string format = "text";
  int q = 4;
  bool q_set = false;
  int stages = 3;
  int cap = 3;
  int model_cap = 3;
  int gens = 2;
  int jobs = 1;
};

void cmd_validate(const Options& o, std::ostream& os) {
  const json j = load(o.file);
  json report;
  std::ostringstream sum;
  if (j.contains("vertices")) {
    const auto g = curve::graph_from_json(j);
    report["kind"] = "graph";
    for (const auto& [name, kind] :
         {std::pair<std::string, curve::GraphKind>{"stable", curve::GraphKind::stable},
          {"minimal_semistable", curve::GraphKind::minimal_semistable}}) {
      const auto rep = curve::validate_graph(g, kind);
      report[name] = {{"ok", rep.ok}, {"first_violation", rep.first_violation}};
      sum << name << ": " << (rep.ok ? "OK" : "FAIL (" + rep.first_violation + ")") << "\n";
    }
  } else if (j.contains("space") || j.contains("diff")) {
    const cdga::Cdga a = cdga::cdga_from_json(j);
    const auto rep = cdga::validate(a);
    report["kind"] = "cdga";
    report["ok"] = rep.ok;
    report["first_violation"] = rep.first_violation;
    sum << "cdga: " << (rep.ok ? "OK" : "FAIL (" + rep.first_violation + ")") << "\n";
  } else {
    throw std::invalid_argument(o.file + ": neither a dual graph nor a cdga");
  }
  emit(report, o.out, o.format, sum.str(), os);
}

void cmd_minimal_model(const Options& o, std::ostream& os) {
  const cdga::Cdga a = cdga::cdga_from_json(load(o.file));
  minimal::BuildOptions opt;
  opt.model_cap = o.model_cap;
  const auto m = minimal::build(a, o.stages, opt);
  json report;
  report["stage_dims"] = m.stage_dims();
  report["total_gens"] = m.total_gens();
  report["model"] = minimal::to_json(m);
  std::ostringstream sum;
  sum << "stage dims: " << dims_line(m.stage_dims()) << "\n"
      << "total degree-1 generators: " << m.total_gens() << "\n";
  emit(report, o.out, o.format, sum.str(), os);
}

void cmd_bar(const Options& o, std::ostream& os) {
  const cdga::Cdga a = cdga::cdga_from_json(load(o.file));
  minimal::BuildOptions opt;
  opt.model_cap = o.model_cap;
  const auto m = minimal::build(a, o.stages, opt);
  const auto b = bar::build_bar(m.model, o.cap);
  const auto h = bar::h0(b);
  const auto cmp = bar::compare_to_M1(b);
  const auto e1 = bar::eilenberg_moore_E1(b);

  json report;
  report["gr_dims"] = h.gr_dim;
  for (const auto& [pq, mat] : h.product)
    report["product"][key(pq.first, pq.second)] = cdga::matrix_to_json(mat);
  for (const auto& [pq, mat] : h.coproduct)
    report["coproduct"][key(pq.first, pq.second)] = cdga::matrix_to_json(mat);
  report["verdicts"]["m1_comparison"] = cmp.ok;
  report["verdicts"]["m1_message"] = cmp.message;
  report["verdicts"]["e1_agree"] = e1.agree;
  std::ostringstream sum;
  sum << "H0 gr dims: " << dims_line(h.gr_dim) << "\n"
      << "comparison with M1: " << (cmp.ok ? "OK" : "FAIL (" + cmp.message + ")") << "\n"
      << "E1 two ways: " << (e1.agree ? "agree" : "DISAGREE") << "\n";
  emit(report, o.out, o.format, sum.str(), os);
}

void cmd_lie_dims(const Options& o, std::ostream& os) {
  const auto dims = lie::lyndon_dims(o.gens, o.q);
  json report;
  report["gens"] = o.gens;
  report["q"] = o.q;
  report["dims"] = dims;
  emit(report, o.out, o.format, dims_line(dims) + "\n", os);
}

void cmd_lie_bch(const Options& o, std::ostream& os) {
  const auto terms = lie::bch_universal(o.q);
  json report;
  report["q"] = o.q;
  std::ostringstream sum;
  for (const auto& [w, c] : terms) {
    report["terms"][w] = c.str();
    sum << w << " " << c.str() << "\n";
  }
  emit(report, o.out, o.format, sum.str(), os);
}

void cmd_lie_inner(const Options& o, std::ostream& os) {
  const json j = load(o.file);
  const auto l = lie::lie_from_json(j.at("algebra"));
  lie::LieAutomorphism phi;
  for (const auto& img : j.at("images")) phi.images.push_back(lie::element_from_json(img));
  const auto v = l.is_inner(phi);
  json report;
  report["inner"] = v.inner;
  std::ostringstream sum;
  if (v.inner) {
    report["witness_log"] = lie::element_to_json(v.witness);
    sum << "INNER (witness log = " << lie::element_to_json(v.witness).dump() << ")\n";
  } else {
    report["obstruction_degree"] = v.obstruction_degree;
    sum << "NOT inner (obstruction degree " << v.obstruction_degree << ")\n";
  }
  emit(report, o.out, o.format, sum.str(), os);
}

// Graph instance files carry the graph, the base datum, and a default q; the
// --q flag overrides the file.
std::tuple<curve::DualGraph, curve::BaseDatum, int> load_instance(const Options& o) {
  const json j = load(o.file);
  const auto g = curve::graph_from_json(j);
  curve::BaseDatum base;
  if (j.contains("base")) base = curve::base_from_json(j.at("base"));
  int q = j.value("q", 4);
  if (o.q_set) q = o.q;
  return {g, base, q};
}

void cmd_curve_presentation(const Options& o, std::ostream& os) {
  const auto [g, base, q] = load_instance(o);
  const auto p = curve::presentation(g, base, q);
  json report;
  report["q"] = q;
  report["gr_dims"] = p.algebra.gr_dims();
  for (const auto& b : p.blocks)
    report["blocks"].push_back({{"vertex", b.vertex},
                                {"genus", b.genus},
                                {"marked", b.marked},
                                {"branches", b.branches},
                                {"labels", b.labels},
                                {"survive", b.survive}});
  for (const auto& [es, x] : p.e)
    report["e"][key(es.first, es.second)] = lie::element_to_json(x);
  std::ostringstream sum;
  sum << "gr dims: " << dims_line(p.algebra.gr_dims()) << "\n" << "generators:";
  for (const auto& lab : p.algebra.generators()) sum << " " << lab;
  sum << "\n";
  emit(report, o.out, o.format, sum.str(), os);
}

void cmd_curve_analyze(const Options& o, std::ostream& os) {
  const auto [g, base, q] = load_instance(o);
  const auto r = curve::analyze(g, base, q);
  std::ostringstream sum;
  if (r.verdict == "trivial in Aut") {
    sum << "TRIVIAL in Aut (good base point)\n";
  } else if (r.verdict == "inner, hence trivial in Out") {
    sum << "INNER, hence trivial in Out (witness log = "
        << lie::element_to_json(r.delta_log).dump() << ")\n";
  } else if (r.loop_pairing != 0) {
    sum << "NONTRIVIAL in Out (abelianized loop pairing " << r.loop_pairing << ")\n";
  } else if (r.nontrivial_in_out) {
    int d = 0;
    for (const auto& iv : r.instances)
      if (iv.non_inner) {
        d = iv.inner.obstruction_degree;
        break;
      }
    sum << "NONTRIVIAL in Out (obstruction degree " << d << "->" << d + 1 << ")\n";
  } else {
    sum << r.verdict << " (all instances inner at this truncation)\n";
  }
  emit(curve::report_to_json(r), o.out, o.format, sum.str(), os);
}

void cmd_curve_loop(const Options& o, std::ostream& os) {
  const auto [g, base, q] = load_instance(o);
  (void)base;
  (void)q;
  const long pairing = curve::loop_check(g);
  json report;
  report["loop_pairing"] = pairing;
  emit(report, o.out, o.format, "loop pairing: " + std::to_string(pairing) + "\n", os);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact unipotent monodromy toolkit"};
  app.require_subcommand(1);
  Options o;
  std::function<void(const Options&, std::ostream&)> action;

  const auto common = [&](CLI::App* c, bool with_file = true) {
    if (with_file) c->add_option("file", o.file, "input JSON")->required();
    c->add_option("--out", o.out, "write the JSON report to this file");
    c->add_option("--format", o.format, "stdout format")
        ->check(CLI::IsMember({"text", "json"}));
    c->add_option("--jobs", o.jobs, "accepted for interface stability (sequential either way)");
  };

  auto* validate = app.add_subcommand("validate", "validate a dual graph or cdga file");
  common(validate);
  validate->callback([&] { action = cmd_validate; });

  auto* mm = app.add_subcommand("minimal-model", "1-minimal model of an augmented cdga");
  common(mm);
  mm->add_option("--stages", o.stages, "Hirsch stages Q");
  mm->add_option("--model-cap", o.model_cap, "top degree assembled in the model (2 or 3)");
  mm->callback([&] { action = cmd_minimal_model; });

  auto* bar_cmd = app.add_subcommand("bar", "H0 of the bar construction of the minimal model");
  common(bar_cmd);
  bar_cmd->add_option("--stages", o.stages, "Hirsch stages Q");
  bar_cmd->add_option("--cap", o.cap, "bar word-length cap S");
  bar_cmd->add_option("--model-cap", o.model_cap, "top degree assembled in the model");
  bar_cmd->callback([&] { action = cmd_bar; });

  auto* lie_cmd = app.add_subcommand("lie", "free nilpotent Lie algebra utilities");
  lie_cmd->require_subcommand(1);
  auto* dims = lie_cmd->add_subcommand("dims", "graded dimensions (Witt formula)");
  common(dims, false);
  dims->add_option("--gens", o.gens, "number of generators");
  dims->add_option("--q", o.q, "truncation degree");
  dims->callback([&] { action = cmd_lie_dims; });
  auto* bch = lie_cmd->add_subcommand("bch", "Baker-Campbell-Hausdorff coefficients");
  common(bch, false);
  bch->add_option("--q", o.q, "truncation degree");
  bch->callback([&] { action = cmd_lie_bch; });
  auto* inner = lie_cmd->add_subcommand("inner", "decide innerness of an automorphism");
  common(inner);
  inner->callback([&] { action = cmd_lie_inner; });

  auto* curve_cmd = app.add_subcommand("curve", "dual-graph monodromy pipelines");
  curve_cmd->require_subcommand(1);
  auto* pres = curve_cmd->add_subcommand("presentation", "amalgamated Lie presentation");
  common(pres);
  pres->add_option("--q", o.q, "truncation degree")->each([&](const std::string&) { o.q_set = true; });
  pres->callback([&] { action = cmd_curve_presentation; });
  auto* analyze = curve_cmd->add_subcommand("analyze", "(non)triviality of the monodromy");
  common(analyze);
  analyze->add_option("--q", o.q, "truncation degree")->each([&](const std::string&) { o.q_set = true; });
  analyze->callback([&] { action = cmd_curve_analyze; });
  auto* loop = curve_cmd->add_subcommand("loop", "abelianized defect of a loop graph");
  common(loop);
  loop->callback([&] { action = cmd_curve_loop; });

  std::vector<const char*> argv{"logpi1"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    action(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace logpi1::cli
