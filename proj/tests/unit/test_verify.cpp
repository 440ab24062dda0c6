#include <doctest.h>

#include "froglab/errors.hpp"
#include "froglab/verify.hpp"

using namespace froglab;

namespace {

VerifyConfig small(int d, double p, std::uint64_t reps, int depth) {
  VerifyConfig c;
  c.d = d;
  c.p = p;
  c.reps = reps;
  c.depth = depth;
  c.seed = 5;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("coupling suite accepts the true law and rejects the shifted control") {
  auto c = small(3, 1.0 / 3, 20000, 0);
  c.start_depth = 4;
  const auto r = verify_lemma_coupling(c);
  CHECK(r.pass);
  CHECK(r.statistics.at("control_rejected") == 1.0);
  CHECK(r.statistics.at("max_abs_z") <= 4.0);
}

TEST_CASE("binomial suite for every J size") {
  for (int j = 0; j <= 2; ++j) {
    auto c = small(3, 0.3, 5000, 6);
    c.j_size = j;
    CHECK_MESSAGE(verify_lemma_binomial(c).pass, "j_size=" << j);
  }
  auto c = small(3, 0.3, 500, 6);
  CHECK_THROWS_AS(verify_lemma_binomial(c), InsufficientEvents);
  c = small(3, 0.3, 5000, 6);
  c.j_size = 3;
  CHECK_THROWS_AS(verify_lemma_binomial(c), InvalidParameter);
}

TEST_CASE("self-consistency, rsfm and self-similarity at moderate sizes") {
  for (auto [d, p] : {std::pair{2, 1.0 / 3}, std::pair{3, 0.1}, std::pair{4, 0.3}}) {
    const auto c = small(d, p, 5000, 7);
    CHECK_MESSAGE(verify_self_consistency(c).pass, d << " " << p);
    CHECK_MESSAGE(verify_rsfm_identity(c).pass, d << " " << p);
    CHECK_MESSAGE(verify_self_similarity(c).pass, d << " " << p);
  }
}

TEST_CASE("domination chain and its reversed control") {
  const auto r = verify_domination(small(3, 1.0 / 3, 2000, 6));
  CHECK(r.pass);
  CHECK(r.statistics.at("control_rejected") == 1.0);
  CHECK(r.statistics.at("mean_sfm") <= r.statistics.at("mean_nbfm"));
  CHECK(r.statistics.at("mean_nbfm") <= r.statistics.at("mean_fm"));
  CHECK(verify_domination(small(3, 0.0, 2000, 4)).pass);
  CHECK_THROWS_AS(verify_domination(small(3, 0.45, 100, 4)), InvalidParameter);
}

TEST_CASE("inequality at the critical drift") {
  for (int d : {3, 4}) {
    auto c = small(d, 0.0, 5000, 7);
    c.xs = {0.0, 0.2, 0.4, 0.6, 0.8, 0.95};
    const auto r = verify_inequality(c);
    CHECK_MESSAGE(r.pass, "d=" << d);
  }
}

TEST_CASE("suite dispatch and reproducibility") {
  CHECK_THROWS_AS(run_suite("nope", small(3, 0.3, 2000, 5)), InvalidParameter);
  const auto c = small(3, 0.3, 3000, 5);
  const auto a = run_suite("rsfm", c), b = run_suite("rsfm", c);
  REQUIRE(a.size() == 1);
  CHECK(a[0].to_json().dump() == b[0].to_json().dump());
  auto c2 = c;
  c2.threads = 3;
  CHECK(run_suite("rsfm", c2)[0].to_json().dump() == a[0].to_json().dump());
  CHECK_THROWS_AS(verify_self_consistency(small(3, 0.3, 2000, 2)), InvalidParameter);
}
