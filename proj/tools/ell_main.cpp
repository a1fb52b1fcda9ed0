// Command-line front door: constructions, spectral reports, model building
// and checking, gadget encoding, tester trials, and the locality-gap witness
// experiment. Machine-readable output (json default, text/csv variants),
// deterministic for a fixed seed; exit code 0 iff all requested
// verifications pass.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ell/folagic.hpp"
#include "ell/gadgets.hpp"
#include "ell/rotgraph.hpp"
#include "ell/sigma2.hpp"
#include "ell/structures.hpp"
#include "ell/testing.hpp"
#include "ell/util.hpp"
#include "ell/witness.hpp"

using namespace ell;
using nlohmann::json;

namespace {

struct Output {
  std::string format = "json";
  json j;

  void emit_json() const { std::cout << j.dump(2) << "\n"; }
  void emit_text(const json& node, const std::string& prefix) const {
    if (node.is_object()) {
      for (auto& [key, value] : node.items())
        emit_text(value, prefix.empty() ? key : prefix + "." + key);
    } else if (node.is_array()) {
      int64_t i = 0;
      for (auto& value : node)
        emit_text(value, prefix + "[" + std::to_string(i++) + "]");
    } else {
      std::cout << prefix << " = " << node.dump() << "\n";
    }
  }
  // csv: flat key,value rows; floats at 12 significant digits via dump
  void emit_csv(const json& node, const std::string& prefix) const {
    if (node.is_object()) {
      for (auto& [key, value] : node.items())
        emit_csv(value, prefix.empty() ? key : prefix + "." + key);
    } else if (node.is_array()) {
      int64_t i = 0;
      for (auto& value : node)
        emit_csv(value, prefix + "[" + std::to_string(i++) + "]");
    } else if (node.is_number_float()) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.12g", node.get<double>());
      std::cout << prefix << "," << buf << "\n";
    } else {
      std::cout << prefix << "," << node.dump() << "\n";
    }
  }
  void flush() const {
    if (format == "json")
      emit_json();
    else if (format == "csv")
      emit_csv(j, "");
    else
      emit_text(j, "");
  }
};

int64_t env_mem_cap(int64_t fallback) {
  if (const char* cap = std::getenv("ELL_MEM_CAP")) {
    try {
      return std::stoll(cap);
    } catch (...) {
      throw std::invalid_argument("ELL_MEM_CAP is not an integer");
    }
  }
  return fallback;
}

json spectral_json(const SpectralReport& sp) {
  return json{{"lambda2", sp.lambda2},   {"lambdaN", sp.lambdaN},
              {"lambda", sp.lambda},     {"connected", sp.connected},
              {"bipartite", sp.bipartite}, {"dense_solver", sp.dense}};
}

RotationGraph base_graph_for(int32_t D, uint64_t seed, int trials, json& cfg) {
  auto base = random_regular_base(D, seed, trials);
  cfg["base_lambda"] = base.lambda;
  cfg["base_lambda_le_quarter"] = base.lambda <= 0.25;
  return std::move(base.graph);
}

Ball tau_from_file(const std::string& path, int r) {
  auto g = load_graph_file(path);
  return ball_from_graph(g, r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ell: zig-zag expander algebra, definable structures, and "
               "bounded-degree property testers"};
  app.require_subcommand(1);

  Output out;
  app.add_option("--format", out.format, "json | text | csv")
      ->check(CLI::IsMember({"json", "text", "csv"}));

  int32_t d_param = 2;
  int depth = 1;
  int radius = 1;
  double epsilon = 0.1;
  uint64_t seed = 1;
  int trials = 64;
  int family_m = 2;
  int64_t cap_tuples = env_mem_cap(1000000);
  int64_t cap_vertices = env_mem_cap(40000000);
  bool exhaustive_h = false;
  bool roundtrip = false;
  double override_lambda = -1.0;
  int64_t override_n0 = -1;

  // spectrum
  std::string spectrum_path;
  auto* cmd_spectrum = app.add_subcommand("spectrum", "spectral report of a rotation graph");
  cmd_spectrum->add_option("file", spectrum_path)->required();
  cmd_spectrum->add_flag("--exhaustive-h", exhaustive_h, "also compute exact h (n <= 24)");

  // family
  std::string family_out = ".";
  auto* cmd_family = app.add_subcommand("family", "build the recursive expander family");
  cmd_family->add_option("--d", d_param);
  cmd_family->add_option("--seed", seed);
  cmd_family->add_option("--trials", trials);
  cmd_family->add_option("--m", family_m);
  cmd_family->add_option("--out", family_out, "output directory");
  cmd_family->add_option("--cap-vertices", cap_vertices);

  // model
  std::string model_out;
  auto* cmd_model = app.add_subcommand("model", "build and verify a canonical model");
  cmd_model->add_option("--d", d_param);
  cmd_model->add_option("--depth", depth);
  cmd_model->add_option("--seed", seed);
  cmd_model->add_option("--trials", trials);
  cmd_model->add_option("--out", model_out, "structure file to write");
  cmd_model->add_option("--cap-tuples", cap_tuples);

  // check
  std::string check_path, check_part = "all";
  auto* cmd_check = app.add_subcommand("check", "run the zig-zag conjunct checkers");
  cmd_check->add_option("file", check_path)->required();
  cmd_check->add_option("--part", check_part)
      ->check(CLI::IsMember({"tree", "rotation", "base", "recursion", "all"}));
  cmd_check->add_option("--d", d_param);
  cmd_check->add_option("--seed", seed);
  cmd_check->add_option("--trials", trials);

  // encode / decode
  std::string encode_path, encode_out, decode_path, decode_out;
  auto* cmd_encode = app.add_subcommand("encode", "arrow-encode a model as a simple graph");
  cmd_encode->add_option("file", encode_path)->required();
  cmd_encode->add_option("--out", encode_out, "graph file to write");
  cmd_encode->add_flag("--roundtrip", roundtrip, "decode again and compare");
  cmd_encode->add_option("--cap-vertices", cap_vertices);

  auto* cmd_decode = app.add_subcommand("decode", "decode an arrow-encoded graph");
  cmd_decode->add_option("file", decode_path)->required();
  cmd_decode->add_option("--out", decode_out, "structure file to write");
  int32_t decode_d = 0;
  cmd_decode->add_option("--d", decode_d, "parameter D (inferred when omitted)");

  // formulas
  std::string formulas_out = ".";
  auto* cmd_formulas = app.add_subcommand("formulas", "emit the zig-zag formula files");
  cmd_formulas->add_option("--d", d_param);
  cmd_formulas->add_option("--seed", seed);
  cmd_formulas->add_option("--trials", trials);
  cmd_formulas->add_option("--out", formulas_out, "output directory");

  // test
  std::string test_path, tester = "freeness", tau_path, pattern_path;
  int test_trials = 100;
  auto* cmd_test = app.add_subcommand("test", "run tester trials on a graph or structure");
  cmd_test->add_option("file", test_path)->required();
  cmd_test->add_option("--tester", tester)
      ->check(CLI::IsMember({"freeness", "regularity", "substructure"}));
  cmd_test->add_option("--tau", tau_path, "graph file; the type is its ball at vertex 0");
  cmd_test->add_option("--r", radius, "type radius");
  cmd_test->add_option("--pattern", pattern_path, "structure file (substructure tester)");
  cmd_test->add_option("--epsilon", epsilon);
  cmd_test->add_option("--trials", test_trials);
  cmd_test->add_option("--seed", seed);
  cmd_test->add_option("--d", d_param, "degree bound of the class");
  cmd_test->add_option("--override-lambda", override_lambda);
  cmd_test->add_option("--override-n0", override_n0);

  // types
  std::string types_path;
  int64_t types_samples = 0;
  auto* cmd_types = app.add_subcommand("types", "neighbourhood type distribution");
  cmd_types->add_option("file", types_path)->required();
  cmd_types->add_option("--r", radius);
  cmd_types->add_option("--samples", types_samples,
                        "sample size (0 = exact full scan)");
  cmd_types->add_option("--seed", seed);
  cmd_types->add_option("--d", d_param, "degree bound of the class");

  // witness
  int witness_rmax = 3;
  auto* cmd_witness = app.add_subcommand("witness", "the locality-gap experiment");
  cmd_witness->add_option("--d", d_param);
  cmd_witness->add_option("--depth", depth);
  cmd_witness->add_option("--seed", seed);
  cmd_witness->add_option("--trials", trials);
  cmd_witness->add_option("--r", witness_rmax, "largest sampling radius attempted");
  cmd_witness->add_option("--cap-tuples", cap_tuples);

  CLI11_PARSE(app, argc, argv);

  bool ok = true;
  try {
    if (*cmd_spectrum) {
      auto g = load_rotgraph_file(spectrum_path);
      auto sp = spectrum(g);
      out.j["config"] = {{"command", "spectrum"}, {"file", spectrum_path}};
      out.j["spectrum"] = spectral_json(sp);
      out.j["cheeger_bound"] = g.degree * (1.0 - sp.lambda) / 2.0;
      if (exhaustive_h) {
        auto cut = expansion_exhaustive(g);
        out.j["h_exact"] = cut.h;
        out.j["h_witness_size"] = int64_t(cut.witness_set.size());
        out.j["h_boundary"] = cut.boundary;
        out.j["cheeger_consistent"] =
            cut.h >= g.degree * (1.0 - sp.lambda) / 2.0 - 1e-9;
        ok = out.j["cheeger_consistent"].get<bool>();
      }
    } else if (*cmd_family) {
      out.j["config"] = {{"command", "family"}, {"D", d_param},   {"seed", seed},
                         {"trials", trials},    {"m", family_m}};
      auto h = base_graph_for(d_param, seed, trials, out.j["config"]);
      double lambda_h = spectrum(h).lambda;
      auto fam = build_family(h, family_m, cap_vertices);
      std::filesystem::create_directories(family_out);
      save_rotgraph_file(family_out + "/H.rotgraph", h);
      out.j["levels"] = json::array();
      double prev = 0.0;
      for (size_t k = 0; k < fam.size(); ++k) {
        save_rotgraph_file(family_out + "/G" + std::to_string(k + 1) + ".rotgraph",
                           fam[k]);
        double lam = spectrum(fam[k]).lambda;
        int64_t want_n = 1;
        for (size_t i = 0; i <= k; ++i) want_n *= int64_t(h.n);
        json lvl = {{"level", k + 1},
                    {"n", fam[k].n},
                    {"size_ok", fam[k].n == want_n},
                    {"degree", fam[k].degree},
                    {"degree_ok", fam[k].degree == d_param * d_param},
                    {"lambda", lam},
                    {"validates", !validate(fam[k]).has_value()}};
        ok = ok && fam[k].n == want_n && fam[k].degree == d_param * d_param;
        if (k > 0) {
          lvl["composition_bound"] = prev * prev + lambda_h;
          lvl["composition_ok"] = lam < prev * prev + lambda_h;
          ok = ok && lam < prev * prev + lambda_h;
        }
        ok = ok && !validate(fam[k]).has_value();
        prev = lam;
        out.j["levels"].push_back(lvl);
      }
    } else if (*cmd_model) {
      out.j["config"] = {{"command", "model"}, {"D", d_param},
                         {"depth", depth},     {"seed", seed},
                         {"trials", trials},   {"cap_tuples", cap_tuples}};
      auto h = base_graph_for(d_param, seed, trials, out.j["config"]);
      ModelCaps caps;
      caps.max_tuples = cap_tuples;
      auto a = build_model(h, depth, caps);
      if (!model_out.empty()) save_structure_file(model_out, a);
      auto rep = verify_model(a, h, depth);
      out.j["size"] = rep.size;
      out.j["size_ok"] = rep.size_ok;
      out.j["tree_ok"] = rep.tree_ok;
      out.j["degree_ok"] = rep.degree_ok;
      out.j["levels"] = json::array();
      for (size_t m = 0; m < rep.levels.size(); ++m)
        out.j["levels"].push_back({{"level", m + 1},
                                   {"size", rep.levels[m].size},
                                   {"iso_checked", rep.levels[m].iso_checked},
                                   {"iso_ok", rep.levels[m].iso_ok}});
      auto chk = check_zigzag(a, h, ZigzagPart::All);
      out.j["zigzag_check"] = chk.ok;
      if (!chk.ok) out.j["zigzag_witness"] = chk.witness;
      auto u = underlying_graph(a);
      auto sp = spectrum(u);
      out.j["underlying"] = {{"degree", u.degree},
                             {"lambda", sp.lambda},
                             {"lambda_below_one", sp.lambda < 1.0}};
      ok = rep.ok() && chk.ok && sp.lambda < 1.0;
    } else if (*cmd_check) {
      out.j["config"] = {{"command", "check"},
                         {"file", check_path},
                         {"part", check_part},
                         {"D", d_param},
                         {"seed", seed},
                         {"trials", trials}};
      auto a = load_structure_file(check_path);
      ZigzagPart part = check_part == "tree"       ? ZigzagPart::Tree
                        : check_part == "rotation" ? ZigzagPart::Rotation
                        : check_part == "base"     ? ZigzagPart::Base
                        : check_part == "recursion" ? ZigzagPart::Recursion
                                                    : ZigzagPart::All;
      CheckResult res;
      if (part == ZigzagPart::Tree || part == ZigzagPart::Rotation) {
        res = check_zigzag_local(a, part);
      } else {
        auto h = base_graph_for(d_param, seed, trials, out.j["config"]);
        res = check_zigzag(a, h, part);
      }
      out.j["ok"] = res.ok;
      if (!res.ok) out.j["witness"] = res.witness;
      ok = res.ok;
    } else if (*cmd_encode) {
      out.j["config"] = {{"command", "encode"},
                         {"file", encode_path},
                         {"cap_vertices", cap_vertices}};
      auto a = load_structure_file(encode_path);
      EncodeCaps caps;
      caps.max_vertices = cap_vertices;
      auto enc = encode(a, caps);
      out.j["original_count"] = enc.provenance.original_count;
      out.j["arrows"] = int64_t(enc.provenance.arrows.size());
      out.j["aux_per_arrow"] = enc.provenance.aux_per_arrow;
      out.j["vertices"] = enc.graph.n();
      out.j["edges"] = enc.graph.edge_count();
      if (!encode_out.empty()) {
        save_graph_file(encode_out, enc.graph);
        json prov;
        prov["original_count"] = enc.provenance.original_count;
        prov["arrows"] = json::array();
        for (const auto& ar : enc.provenance.arrows)
          prov["arrows"].push_back({{"symbol", a.sig().symbols[ar.symbol].name},
                                    {"x", ar.x},
                                    {"y", ar.y},
                                    {"base", ar.base},
                                    {"p", ar.p}});
        std::ofstream ps(encode_out + ".provenance.json");
        ps << prov.dump(2) << "\n";
      }
      if (roundtrip) {
        auto back = decode(enc.graph);
        out.j["roundtrip_identity"] = back == a;
        ok = back == a;
      }
      auto orig = original_vertices(enc.graph);
      out.j["triangle_free_count"] = int64_t(orig.size());
      ok = ok && int64_t(orig.size()) == a.n();
    } else if (*cmd_decode) {
      out.j["config"] = {{"command", "decode"}, {"file", decode_path}};
      auto g = load_graph_file(decode_path);
      std::optional<int32_t> dopt;
      if (decode_d > 0) dopt = decode_d;
      auto a = decode(g, dopt);
      out.j["universe"] = a.n();
      out.j["tuples"] = a.total_tuples();
      if (!decode_out.empty()) save_structure_file(decode_out, a);
    } else if (*cmd_formulas) {
      out.j["config"] = {{"command", "formulas"}, {"D", d_param},
                         {"seed", seed},          {"trials", trials}};
      auto h = base_graph_for(d_param, seed, trials, out.j["config"]);
      Signature sig = signature_for(d_param);
      std::filesystem::create_directories(formulas_out);
      auto write = [&](const std::string& name, const FormulaPtr& f) {
        std::ofstream fs(formulas_out + "/" + name + ".fo");
        fs << print_formula(f, sig) << "\n";
        out.j["files"].push_back(name + ".fo");
      };
      out.j["files"] = json::array();
      write("phi_root", phi_root(d_param, "x"));
      write("phi_tree", phi_tree(d_param));
      write("phi_rotationMap", phi_rotation_map(d_param));
      write("phi_base", phi_base(h));
      write("phi_recursion", phi_recursion(h));
      write("phi_zigzag", phi_zigzag(h));
    } else if (*cmd_test) {
      out.j["config"] = {{"command", "test"},     {"file", test_path},
                         {"tester", tester},      {"epsilon", epsilon},
                         {"trials", test_trials}, {"seed", seed},
                         {"d", d_param},          {"r", radius}};
      // graph or structure input, by header
      std::ifstream probe(test_path);
      std::string head;
      probe >> head;
      probe.close();
      std::unique_ptr<SimpleGraph> graph;
      std::unique_ptr<Structure> structure;
      std::unique_ptr<Oracle> oracle;
      if (head == "graph") {
        graph = std::make_unique<SimpleGraph>(load_graph_file(test_path));
        oracle = std::make_unique<GraphOracle>(*graph, d_param);
      } else {
        structure = std::make_unique<Structure>(load_structure_file(test_path));
        oracle = std::make_unique<StructureOracle>(*structure, d_param);
      }
      TesterOverrides ov;
      if (override_lambda > 0) ov.lambda = override_lambda;
      if (override_n0 > 0) ov.n0 = override_n0;

      std::optional<Ball> tau;
      std::optional<Structure> pattern;
      if (tester == "substructure") {
        require(!pattern_path.empty(), "test: --pattern required");
        pattern = load_structure_file(pattern_path);
      } else {
        require(!tau_path.empty(), "test: --tau required");
        tau = tau_from_file(tau_path, radius);
      }

      int64_t accepts = 0;
      out.j["trials"] = json::array();
      for (int i = 0; i < test_trials; ++i) {
        uint64_t trial_seed = Rng::split(seed, uint64_t(i));
        auto t0 = std::chrono::steady_clock::now();
        TesterOutcome res;
        if (tester == "freeness") {
          ov.seed = trial_seed;
          res = freeness_tester(*oracle, *tau, epsilon, ov);
        } else if (tester == "regularity") {
          ov.seed = trial_seed;
          res = regularity_tester(*oracle, *tau, epsilon, ov);
        } else {
          res = substructure_freeness_tester(*oracle, *pattern, epsilon, trial_seed);
        }
        double wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        accepts += res.accept ? 1 : 0;
        out.j["trials"].push_back({{"seed", trial_seed},
                                   {"verdict", res.accept ? "accept" : "reject"},
                                   {"queries", res.queries},
                                   {"wall_ms", wall_ms},
                                   {"reason", res.reason}});
      }
      out.j["accept_rate"] = double(accepts) / double(test_trials);
      out.j["reject_rate"] = 1.0 - double(accepts) / double(test_trials);
    } else if (*cmd_types) {
      out.j["config"] = {{"command", "types"},
                         {"file", types_path},
                         {"r", radius},
                         {"samples", types_samples},
                         {"seed", seed}};
      std::ifstream probe(types_path);
      std::string head;
      probe >> head;
      probe.close();
      std::unique_ptr<SimpleGraph> graph;
      std::unique_ptr<Structure> structure;
      std::unique_ptr<Oracle> oracle;
      if (head == "graph") {
        graph = std::make_unique<SimpleGraph>(load_graph_file(types_path));
        oracle = std::make_unique<GraphOracle>(*graph, d_param);
      } else {
        structure = std::make_unique<Structure>(load_structure_file(types_path));
        oracle = std::make_unique<StructureOracle>(*structure, d_param);
      }
      TypeDistribution dist =
          types_samples > 0
              ? estimate_frequencies(*oracle, radius, types_samples, seed)
              : rho_exact(*oracle, radius);
      out.j["distribution"] = json::parse(type_distribution_to_json(dist));
    } else if (*cmd_witness) {
      auto rep = run_witness(d_param, depth, seed, trials, witness_rmax, cap_tuples);
      out.j = json::parse(witness_to_json(rep));
      out.j["conclusion"] =
          rep.exhibited
              ? "locality gap exhibited: certified farness with matching local "
                "statistics"
              : "locality gap NOT exhibited at these parameters";
      ok = rep.exhibited;
    }
  } catch (const std::exception& e) {
    out.j["error"] = e.what();
    out.flush();
    return 2;
  }

  out.flush();
  return ok ? 0 : 1;
}
