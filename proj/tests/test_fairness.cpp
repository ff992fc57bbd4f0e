#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fogfair/fairness.hpp"

using namespace fogfair;

namespace {

// Independent oracle: exact integer counting plus reduced-fraction division.
// Reduced and unreduced quotients of the same rational round identically, so
// comparisons against the library can demand bitwise equality.
struct OracleRatio {
  bool empty = false;
  bool both_zero = false;
  double value = 0.0;
};

OracleRatio oracle_ratio(long long p0, long long n0, long long p1, long long n1) {
  OracleRatio r;
  if (n0 == 0 || n1 == 0) {
    r.empty = true;
    return r;
  }
  if (p0 == 0 && p1 == 0) {
    r.both_zero = true;
    r.value = 1.0;
    return r;
  }
  if (p0 == 0 || p1 == 0) {
    r.value = 0.0;
    return r;
  }
  long long a = p0 * n1;
  long long b = p1 * n0;
  if (a > b) std::swap(a, b);
  long long g = std::gcd(a, b);
  r.value = static_cast<double>(a / g) / static_cast<double>(b / g);
  return r;
}

struct OracleCounts {
  long long n[2] = {0, 0};
  long long pred_pos[2] = {0, 0};
  long long cond_pos[2] = {0, 0};
  long long tp[2] = {0, 0};
  long long cond_neg[2] = {0, 0};
  long long fp[2] = {0, 0};
};

OracleCounts oracle_counts(const PredictionSet& p, const GroupAssignment& ga) {
  OracleCounts c;
  for (std::size_t i = 0; i < p.unit_ids.size(); ++i) {
    int g = ga.membership.at(p.unit_ids[i]);
    c.n[g]++;
    if (p.y_pred[i]) c.pred_pos[g]++;
    if (p.y_true[i]) {
      c.cond_pos[g]++;
      if (p.y_pred[i]) c.tp[g]++;
    } else {
      c.cond_neg[g]++;
      if (p.y_pred[i]) c.fp[g]++;
    }
  }
  return c;
}

void check_against_oracle(const MetricValue& got, const OracleRatio& want) {
  if (want.empty) {
    CHECK(got.flags.count(DegenerateFlag::EmptyGroup) == 1);
    return;
  }
  if (want.both_zero) {
    CHECK(got.flags.count(DegenerateFlag::ZeroRateBothGroups) == 1);
    CHECK(got.value == 1.0);
    return;
  }
  CHECK(got.flags.empty());
  CHECK(got.value == want.value);  // bitwise
}

PredictionSet make_preds(const std::vector<int>& groups, const std::vector<int>& pred,
                         const std::vector<int>& truth, GroupAssignment& ga,
                         AttributeName attr = AttributeName::Sex) {
  ga.attribute = attr;
  PredictionSet p;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    std::string id = "u" + std::to_string(i);
    ga.membership[id] = groups[i];
    p.unit_ids.push_back(id);
    p.y_pred.push_back(static_cast<std::uint8_t>(pred[i]));
    p.y_true.push_back(static_cast<std::uint8_t>(truth[i]));
  }
  return p;
}

SubjectMetadata subject(const std::string& id, Sex sex, double age, double duration) {
  SubjectMetadata m;
  m.subject_id = id;
  m.sex = sex;
  m.age_years = age;
  m.disease_duration_years = duration;
  return m;
}

}  // namespace

TEST_CASE("attribute names round-trip and carry their level") {
  for (auto a : {AttributeName::Sex, AttributeName::Age, AttributeName::DiseaseDuration,
                 AttributeName::FogPhenotype})
    CHECK(parse_attribute_name(attribute_name_str(a)) == a);
  CHECK_THROWS_AS(parse_attribute_name("height"), Error);
  CHECK(attribute_level(AttributeName::Sex) == AttributeLevel::Subject);
  CHECK(attribute_level(AttributeName::DiseaseDuration) == AttributeLevel::Subject);
  CHECK(attribute_level(AttributeName::FogPhenotype) == AttributeLevel::Episode);
}

TEST_CASE("demographic parity on a hand-worked split") {
  GroupAssignment ga;
  PredictionSet p = make_preds({0, 0, 0, 1, 1, 1}, {1, 0, 0, 1, 1, 0}, {1, 1, 1, 1, 1, 1}, ga);
  // Rates 1/3 vs 2/3 -> ratio exactly 0.5.
  CHECK(demographic_parity_ratio(p, ga) == 0.5);

  FairnessResult r = compute_fairness(p, ga);
  CHECK(r.dpr.value == 0.5);
  CHECK(r.dpr.flags.empty());
  CHECK(r.positive_rate[0] == doctest::Approx(1.0 / 3.0));
  CHECK(r.positive_rate[1] == doctest::Approx(2.0 / 3.0));
  CHECK(r.group_size[0] == 3);
  CHECK(r.group_size[1] == 3);

  // All units are condition-positive: TPPR mirrors DPR, FPRR has no basis.
  REQUIRE(r.tppr.has_value());
  CHECK(r.tppr->value == 0.5);
  REQUIRE(r.fprr.has_value());
  CHECK(r.fprr->flags.count(DegenerateFlag::EmptyGroup) == 1);
  // EOR takes the surviving component's value but inherits the flag.
  REQUIRE(r.eor.has_value());
  CHECK(r.eor->value == 0.5);
  CHECK(r.eor->degenerate());

  // EOD: |1/3 - 2/3| = 1/3.
  CHECK(equality_of_opportunity_difference(p, ga) == doctest::Approx(1.0 / 3.0));
  CHECK(r.eod.value == doctest::Approx(r.tpr[1] - r.tpr[0]));
}

TEST_CASE("degenerate rate conventions") {
  SUBCASE("both rates zero: value one, flagged") {
    GroupAssignment ga;
    PredictionSet p = make_preds({0, 0, 1, 1}, {0, 0, 0, 0}, {1, 0, 1, 0}, ga);
    FairnessResult r = compute_fairness(p, ga);
    CHECK(r.dpr.value == 1.0);
    CHECK(r.dpr.flags.count(DegenerateFlag::ZeroRateBothGroups) == 1);
  }
  SUBCASE("exactly one rate zero: value zero, unflagged") {
    GroupAssignment ga;
    PredictionSet p = make_preds({0, 0, 1, 1}, {0, 0, 1, 0}, {1, 0, 1, 0}, ga);
    FairnessResult r = compute_fairness(p, ga);
    CHECK(r.dpr.value == 0.0);
    CHECK(r.dpr.flags.empty());
  }
  SUBCASE("empty group flags instead of throwing") {
    GroupAssignment ga;
    PredictionSet p = make_preds({0, 0}, {1, 0}, {1, 0}, ga);
    ga.membership["spare"] = 1;  // group 1 exists but receives no units
    FairnessResult r = compute_fairness(p, ga);
    CHECK(r.dpr.flags.count(DegenerateFlag::EmptyGroup) == 1);
    CHECK(std::isnan(r.positive_rate[1]));
  }
}

TEST_CASE("throwing variants raise EmptyGroup") {
  GroupAssignment ga;
  PredictionSet p = make_preds({0, 0}, {1, 0}, {1, 0}, ga);
  ga.membership["spare"] = 1;
  try {
    equality_of_opportunity_difference(p, ga);
    FAIL("expected EmptyGroup");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyGroup);
  }

  GroupAssignment ga2;
  PredictionSet p2 = make_preds({0, 1, 0, 1}, {1, 0, 1, 1}, {0, 0, 0, 0}, ga2);
  try {
    equality_of_opportunity_difference(p2, ga2);  // no condition positives
    FAIL("expected EmptyGroup");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyGroup);
  }
}

TEST_CASE("demographic_parity_ratio throws when a group is absent") {
  GroupAssignment ga;
  PredictionSet p = make_preds({0, 0, 0}, {1, 0, 1}, {1, 1, 0}, ga);
  try {
    demographic_parity_ratio(p, ga);
    FAIL("expected EmptyGroup");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyGroup);
  }
}

TEST_CASE("prediction set integrity checks") {
  GroupAssignment ga;
  PredictionSet p = make_preds({0, 1}, {1, 0}, {1, 1}, ga);
  SUBCASE("unknown unit") {
    p.unit_ids[0] = "stranger";
    try {
      compute_fairness(p, ga);
      FAIL("expected UnknownGroupMember");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownGroupMember);
    }
  }
  SUBCASE("ragged fields") {
    p.y_true.pop_back();
    try {
      compute_fairness(p, ga);
      FAIL("expected LengthMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::LengthMismatch);
    }
  }
}

TEST_CASE("equalized odds rejects the phenotype attribute") {
  GroupAssignment ga;
  PredictionSet p = make_preds({0, 1}, {1, 0}, {1, 1}, ga, AttributeName::FogPhenotype);
  try {
    equalized_odds_ratio(p, ga);
    FAIL("expected InvalidMetricForAttribute");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidMetricForAttribute);
  }
  // compute_fairness leaves the ratio metrics unset instead.
  FairnessResult r = compute_fairness(p, ga);
  CHECK(!r.tppr.has_value());
  CHECK(!r.fprr.has_value());
  CHECK(!r.eor.has_value());
}

TEST_CASE("metrics match the rational oracle on random instances bitwise") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<int> n_dist(1, 50);
    std::uniform_int_distribution<int> bit(0, 1);
    const int n = n_dist(gen);
    GroupAssignment ga;
    ga.attribute = AttributeName::Age;
    PredictionSet p;
    for (int i = 0; i < n; ++i) {
      std::string id = "u" + std::to_string(i);
      ga.membership[id] = bit(gen);
      p.unit_ids.push_back(id);
      p.y_pred.push_back(static_cast<std::uint8_t>(bit(gen)));
      p.y_true.push_back(static_cast<std::uint8_t>(bit(gen)));
    }

    FairnessResult r = compute_fairness(p, ga);
    OracleCounts c = oracle_counts(p, ga);

    check_against_oracle(r.dpr, oracle_ratio(c.pred_pos[0], c.n[0], c.pred_pos[1], c.n[1]));
    REQUIRE(r.tppr.has_value());
    REQUIRE(r.fprr.has_value());
    check_against_oracle(*r.tppr, oracle_ratio(c.tp[0], c.cond_pos[0], c.tp[1], c.cond_pos[1]));
    check_against_oracle(*r.fprr, oracle_ratio(c.fp[0], c.cond_neg[0], c.fp[1], c.cond_neg[1]));

    // EOD oracle: |tp0*np1 - tp1*np0| / (np0*np1) with gcd reduction.
    if (c.cond_pos[0] > 0 && c.cond_pos[1] > 0) {
      long long num = std::llabs(c.tp[0] * c.cond_pos[1] - c.tp[1] * c.cond_pos[0]);
      long long den = c.cond_pos[0] * c.cond_pos[1];
      double want = 0.0;
      if (num > 0) {
        long long g = std::gcd(num, den);
        want = static_cast<double>(num / g) / static_cast<double>(den / g);
      }
      CHECK(r.eod.flags.empty());
      CHECK(r.eod.value == want);
    } else {
      CHECK(r.eod.flags.count(DegenerateFlag::EmptyGroup) == 1);
    }

    // EOR: min over non-degenerate components, flags unioned.
    REQUIRE(r.eor.has_value());
    const bool t_ok = !r.tppr->degenerate();
    const bool f_ok = !r.fprr->degenerate();
    if (t_ok && f_ok)
      CHECK(r.eor->value == std::min(r.tppr->value, r.fprr->value));
    else if (t_ok)
      CHECK(r.eor->value == r.tppr->value);
    else if (f_ok)
      CHECK(r.eor->value == r.fprr->value);
    CHECK(r.eor->degenerate() == !(t_ok && f_ok));
  }
}

TEST_CASE("dichotomize codes sex and median-splits numeric attributes") {
  std::vector<SubjectMetadata> meta{
      subject("S1", Sex::Female, 50, 2), subject("S2", Sex::Male, 60, 4),
      subject("S3", Sex::Female, 70, 9), subject("S4", Sex::Male, 80, 11)};

  GroupAssignment sex = dichotomize(meta, AttributeName::Sex);
  CHECK(sex.membership.at("S1") == 0);
  CHECK(sex.membership.at("S2") == 1);
  CHECK(!sex.dichotomization_threshold.has_value());
  CHECK(sex.flags.empty());

  GroupAssignment age = dichotomize(meta, AttributeName::Age);
  CHECK(age.dichotomization_threshold == 65.0);
  CHECK(age.membership.at("S1") == 0);
  CHECK(age.membership.at("S2") == 0);
  CHECK(age.membership.at("S3") == 1);
  CHECK(age.membership.at("S4") == 1);

  // Odd count: median is the middle order statistic, and <= goes to group 0.
  GroupAssignment dur =
      dichotomize({meta[0], meta[1], meta[2]}, AttributeName::DiseaseDuration);
  CHECK(dur.dichotomization_threshold == 4.0);
  CHECK(dur.membership.at("S1") == 0);
  CHECK(dur.membership.at("S2") == 0);
  CHECK(dur.membership.at("S3") == 1);
}

TEST_CASE("dichotomize edge cases") {
  SUBCASE("identical values") {
    std::vector<SubjectMetadata> meta{subject("a", Sex::Female, 60, 5),
                                      subject("b", Sex::Male, 60, 5)};
    try {
      dichotomize(meta, AttributeName::Age);
      FAIL("expected AllIdenticalValues");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::AllIdenticalValues);
    }
  }
  SUBCASE("single-sex cohort is flagged") {
    std::vector<SubjectMetadata> meta{subject("a", Sex::Female, 60, 5),
                                      subject("b", Sex::Female, 70, 8)};
    GroupAssignment ga = dichotomize(meta, AttributeName::Sex);
    CHECK(ga.flags.count(DegenerateFlag::EmptyGroup) == 1);
  }
  SUBCASE("no subjects") {
    CHECK_THROWS_AS(dichotomize({}, AttributeName::Sex), Error);
  }
  SUBCASE("phenotype is not a metadata attribute") {
    std::vector<SubjectMetadata> meta{subject("a", Sex::Female, 60, 5)};
    try {
      dichotomize(meta, AttributeName::FogPhenotype);
      FAIL("expected InvalidMetricForAttribute");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidMetricForAttribute);
    }
  }
}

TEST_CASE("phenotype groups come from episode spectra") {
  auto make_ep = [](const std::string& rec, std::size_t start, double hz) {
    Episode ep;
    ep.subject_id = "S";
    ep.recording_id = rec;
    ep.start_index = start;
    ep.end_index = start + 128;
    ep.channels = {{BodyLocation::LowerBack, Axis::X}};
    ep.sampling_rate_hz = 64.0;
    ep.data = Matrix(128, 1);
    for (std::size_t i = 0; i < 128; ++i)
      ep.data(i, 0) =
          1.5 + std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / 64.0);
    return ep;
  };
  std::vector<Episode> eps{make_ep("r1", 0, 1.0), make_ep("r1", 300, 6.0)};
  GroupAssignment ga = assign_phenotype_groups(eps, 64.0);
  CHECK(ga.attribute == AttributeName::FogPhenotype);
  CHECK(ga.membership.at("r1#0") == 0);    // akinetic
  CHECK(ga.membership.at("r1#300") == 1);  // tremulous
  CHECK(ga.flags.empty());

  GroupAssignment lone = assign_phenotype_groups({eps[0]}, 64.0);
  CHECK(lone.flags.count(DegenerateFlag::EmptyGroup) == 1);

  try {
    assign_phenotype_groups({}, 64.0);
    FAIL("expected NoEpisodes");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoEpisodes);
  }
}

TEST_CASE("four-fifths verdict boundary") {
  CHECK(four_fifths_verdict(0.8) == Verdict::Fair);
  CHECK(four_fifths_verdict(0.85) == Verdict::Fair);
  CHECK(four_fifths_verdict(0.799) == Verdict::Biased);
  CHECK(four_fifths_verdict(0.0) == Verdict::Biased);
  CHECK(verdict_name(Verdict::Fair) == std::string("Fair"));
  CHECK(verdict_name(Verdict::Biased) == std::string("Biased"));
}
