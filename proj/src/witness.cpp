#include "ell/witness.hpp"

#include <json.hpp>

#include "ell/testing.hpp"
#include "ell/util.hpp"

namespace ell {

WitnessReport run_witness(int32_t D, int depth, uint64_t seed, int trials,
                          int r_max, int64_t tuple_cap) {
  require(D == 2 || D == 3, "witness: D must be 2 or 3");
  require(depth >= 2, "witness: depth must be >= 2");
  WitnessReport rep;
  rep.D = D;
  rep.depth = depth;
  rep.seed = seed;
  rep.trials = trials;

  auto base = random_regular_base(D, seed, trials);
  ModelCaps caps;
  caps.max_tuples = tuple_cap;
  Structure a = build_model(base.graph, depth, caps);
  Structure small = build_model(base.graph, depth - 1, caps);

  rep.n = a.n();
  rep.copies = a.n() / small.n();
  rep.padding = a.n() - rep.copies * small.n();
  auto lay = layout_of(a.sig()).value();
  rep.d = lay.degree_bound();
  rep.epsilon = 1.0 / (144.0 * double(lay.D2));

  Structure b = disjoint_copies(small, rep.copies, a.n());

  // spectral side information on U(A)
  RotationGraph u = underlying_graph(a);
  rep.lambda_u = spectrum(u).lambda;
  rep.cheeger_h = double(u.degree) * (1.0 - rep.lambda_u) / 2.0;
  rep.threshold = rep.epsilon * double(rep.d) * double(rep.n);

  // the farness bound: B has no tuples across its component partition, so
  // turning A into B (as labelled) must modify at least the cut of U(A)
  // across any balanced union S of B components (edit-distance cut mode)
  std::vector<int32_t> s;
  int64_t half = rep.n / 2;
  for (int64_t c = 0; c < rep.copies; ++c) {
    if (int64_t(s.size()) + small.n() > half) break;
    for (int64_t v = 0; v < small.n(); ++v)
      s.push_back(int32_t(c * small.n() + v));
  }
  for (int64_t v = rep.copies * small.n();
       v < rep.n && int64_t(s.size()) < half; ++v)
    s.push_back(int32_t(v));
  rep.witness_set_size = int64_t(s.size());
  rep.measured_cut = edit_distance_cut_bound(a, b, s);
  rep.certified_lower_bound = double(rep.measured_cut);
  rep.farness_certified = rep.certified_lower_bound >= rep.threshold;

  // sampling distances, radius by radius, within the canonicalization caps
  StructureOracle oa(a), ob(b);
  for (int r = 0; r <= r_max; ++r) {
    try {
      auto da = rho_exact(oa, r);
      auto db = rho_exact(ob, r);
      if (r == 1) {
        rep.support_a_r1 = da.support();
        rep.support_b_r1 = db.support();
      }
      rep.delta_per_radius.push_back(0.5 * l1_distance(da, db));
      rep.delta_computed.push_back(true);
    } catch (const std::exception&) {
      rep.delta_per_radius.push_back(-1.0);
      rep.delta_computed.push_back(false);
    }
  }
  require(rep.delta_computed.size() >= 2 && rep.delta_computed[1],
          "witness: radius-1 distribution exceeded the ball cap");
  rep.delta1 = rep.delta_per_radius[1];
  rep.farness_normalized =
      rep.certified_lower_bound / (double(rep.d) * double(rep.n));
  rep.locality_gap = rep.delta1 < rep.farness_normalized;
  rep.exhibited = rep.farness_certified && rep.locality_gap;
  return rep;
}

std::string witness_to_json(const WitnessReport& rep) {
  nlohmann::json j;
  j["config"] = {{"D", rep.D},
                 {"depth", rep.depth},
                 {"seed", rep.seed},
                 {"trials", rep.trials}};
  j["n"] = rep.n;
  j["copies"] = rep.copies;
  j["padding"] = rep.padding;
  j["d"] = rep.d;
  j["epsilon"] = rep.epsilon;
  j["lambda_U"] = rep.lambda_u;
  j["cheeger_h_bound"] = rep.cheeger_h;
  j["witness_set_size"] = rep.witness_set_size;
  j["measured_cut"] = rep.measured_cut;
  j["certified_farness_lower_bound"] = rep.certified_lower_bound;
  j["threshold_eps_d_n"] = rep.threshold;
  j["delta_per_radius"] = nlohmann::json::array();
  for (size_t r = 0; r < rep.delta_per_radius.size(); ++r) {
    if (rep.delta_computed[r])
      j["delta_per_radius"].push_back(rep.delta_per_radius[r]);
    else
      j["delta_per_radius"].push_back("skipped (ball cap)");
  }
  j["delta_radius_1"] = rep.delta1;
  j["support_r1"] = {{"A", rep.support_a_r1}, {"B", rep.support_b_r1}};
  j["farness_normalized"] = rep.farness_normalized;
  j["farness_certified"] = rep.farness_certified;
  j["locality_gap"] = rep.locality_gap;
  j["exhibited"] = rep.exhibited;
  return j.dump(2);
}

}  // namespace ell
