#include <gtest/gtest.h>

#include "support.hpp"
#include "tello_arena/scoring.hpp"

using namespace tello;
using tello::testing::Rng;

namespace {

const std::filesystem::path kData = TELLO_DATA_DIR;

MissionEvent behavior(double t, BehaviorKind b)
{
    MissionEvent e = truth(t, EventKind::BehaviorCompleted);
    e.behavior = b;
    return e;
}

MissionEvent recording(double t, EventKind k, const char* trigger, int frames)
{
    MissionEvent e = claim(t, k);
    e.detail = trigger;
    e.index = frames;
    e.verified = true;
    return e;
}

MissionEvent landed(double t, double cm)
{
    MissionEvent e = truth(t, EventKind::Landed);
    e.distance_cm = cm;
    return e;
}

MissionEvent coverage(double t, double covered, double aligned)
{
    MissionEvent e = truth(t, EventKind::Coverage);
    e.covered = covered;
    e.aligned = aligned;
    return e;
}

std::vector<MissionEvent> perfect_run()
{
    return {truth(1, EventKind::TakeOff),
            behavior(2, BehaviorKind::AscendHigh),
            behavior(3, BehaviorKind::Spin360Left),
            recording(4, EventKind::RecordingStarted, "red-rectangle", 0),
            behavior(5, BehaviorKind::Spin360Right),
            recording(6, EventKind::RecordingStopped, "blue-rectangle", 40),
            behavior(7, BehaviorKind::DescendLow),
            truth(8, EventKind::VictimPickup),
            landed(9, 4.0),
            coverage(9, 1.0, 1.0)};
}

MissionEvent phase(double t, int i)
{
    MissionEvent e = truth(t, EventKind::PhaseComplete);
    e.index = i;
    return e;
}

}  // namespace

TEST(Scoring, TakeOffOnly) { EXPECT_EQ(score_2023({truth(1, EventKind::TakeOff)}).total, 5); }

TEST(Scoring, LineLeavesClampAtZero)
{
    const auto r = score_2023({truth(1, EventKind::TakeOff), truth(2, EventKind::LineLeave), truth(3, EventKind::LineLeave)});
    EXPECT_EQ(r.autonomous_subtotal, 0);
    EXPECT_EQ(r.total, 0);
    EXPECT_EQ(r.line_items.size(), 3u);
}

TEST(Scoring, PerfectRun)
{
    const auto r = score_2023(perfect_run());
    EXPECT_EQ(r.autonomous_subtotal, 80);
    EXPECT_EQ(score_2023(perfect_run(), std::nullopt, 30).total, 110);
}

TEST(Scoring, Rings)
{
    std::vector<MissionEvent> ev;
    for (int i = 0; i < 7; ++i)
        ev.push_back(phase(i + 1.0, i));
    EXPECT_EQ(score_rings(ev).total, 70);
    for (int i = 0; i < 3; ++i) {
        MissionEvent touch = truth(10.0 + i, EventKind::RingTouch);
        ev.push_back(touch);
    }
    EXPECT_EQ(score_rings(ev).total, 64);
    EXPECT_EQ(score_rings({}).total, 0);
    EXPECT_EQ(score_rings({phase(1, 7), phase(2, -1)}).total, 0);
}

TEST(Scoring, EmptyLogScoresInterviewOnly) { EXPECT_EQ(score_2023({}, std::nullopt, 17).total, 17); }

TEST(Scoring, LandingTiers)
{
    EXPECT_EQ(judge_landing({1, 1}, {1, 1}), 10);
    EXPECT_EQ(judge_landing({1.15, 1}, {1, 1}), 5);
    EXPECT_EQ(judge_landing({1.25, 1}, {1, 1}), 0);
    EXPECT_EQ(landing_points(10.0), 10);
    EXPECT_EQ(landing_points(10.01), 5);
    EXPECT_EQ(landing_points(20.0), 5);
    EXPECT_EQ(landing_points(20.01), 0);
}

TEST(Scoring, FollowingTiers)
{
    EXPECT_EQ(following_points(1.0, 0.79), 0);
    EXPECT_EQ(following_points(0.95, 0.8), 25);
    EXPECT_EQ(following_points(0.94, 1.0), 20);
    EXPECT_EQ(following_points(0.75, 1.0), 20);
    EXPECT_EQ(following_points(0.5, 1.0), 15);
    EXPECT_EQ(following_points(0.49, 1.0), 0);
}

TEST(Scoring, ClaimsDoNotScore)
{
    std::vector<MissionEvent> ev = {claim(1, EventKind::TakeOff), claim(2, EventKind::VictimPickup)};
    EXPECT_EQ(score_2023(ev).total, 0);
}

TEST(Scoring, RecordingRules)
{
    auto with = [](std::vector<MissionEvent> rec) {
        std::vector<MissionEvent> ev = {truth(0, EventKind::TakeOff)};
        ev.insert(ev.end(), rec.begin(), rec.end());
        return score_2023(ev).total - 5;
    };
    EXPECT_EQ(with({recording(1, EventKind::RecordingStarted, "red-rectangle", 0),
                    recording(2, EventKind::RecordingStopped, "blue-rectangle", 10)}),
              10);
    // Stopped before started.
    EXPECT_EQ(with({recording(1, EventKind::RecordingStopped, "blue-rectangle", 10),
                    recording(2, EventKind::RecordingStarted, "red-rectangle", 0)}),
              0);
    // Empty file.
    EXPECT_EQ(with({recording(1, EventKind::RecordingStarted, "red-rectangle", 0),
                    recording(2, EventKind::RecordingStopped, "blue-rectangle", 0)}),
              0);
    // Wrong trigger.
    EXPECT_EQ(with({recording(1, EventKind::RecordingStarted, "red-rectangle", 0),
                    recording(2, EventKind::RecordingStopped, "mission-end", 10)}),
              0);
    auto unverified = recording(2, EventKind::RecordingStopped, "blue-rectangle", 10);
    unverified.verified = false;
    EXPECT_EQ(with({recording(1, EventKind::RecordingStarted, "red-rectangle", 0), unverified}), 0);
}

TEST(Scoring, DuplicatesAndWarnings)
{
    const auto r = score_2023({truth(1, EventKind::TakeOff), behavior(2, BehaviorKind::AscendHigh),
                               behavior(3, BehaviorKind::AscendHigh), truth(4, EventKind::TakeOff),
                               behavior(5, BehaviorKind::StartRecording)});
    EXPECT_EQ(r.total, 10);
    ASSERT_EQ(r.warnings.size(), 1u);
}

TEST(Scoring, OnlyFirstLandingCounts)
{
    EXPECT_EQ(score_2023({landed(1, 30), landed(2, 0)}).total, 0);
}

TEST(Scoring, TraceOverridesLoggedCoverage)
{
    const std::vector<MissionEvent> ev = {coverage(1, 0.6, 1.0)};
    EXPECT_EQ(score_2023(ev).total, 15);
    EXPECT_EQ(score_2023(ev, CoverageTrace{1.0, 1.0, 10, 10}).total, 25);
}

TEST(Scoring, Errors)
{
    try {
        score_2023({truth(2, EventKind::TakeOff), truth(1, EventKind::LineLeave)});
        FAIL();
    } catch (const ScoringError& e) {
        EXPECT_EQ(e.code(), ScoringErrc::UnorderedEvents);
    }
    EXPECT_THROW(score_rings({phase(2, 0), phase(1, 1)}), ScoringError);
    EXPECT_THROW(score_2023({}, std::nullopt, 31), ScoringError);
}

TEST(Scoring, RuleTableIsComplete)
{
    ASSERT_EQ(rubric_2023().size(), tello::testing::oracle_rules_2023().size());
    for (std::size_t i = 0; i < rubric_2023().size(); ++i)
        EXPECT_STREQ(rubric_2023()[i].id, tello::testing::oracle_rules_2023()[i].id);
    // Every line item refers to a known rule.
    for (const auto& item : score_2023(perfect_run()).line_items) {
        const bool known = std::any_of(rubric_2023().begin(), rubric_2023().end(),
                                       [&](const RubricRule& r) { return item.rule == r.id; });
        EXPECT_TRUE(known) << item.rule;
    }
}

TEST(Scoring, MatchesBruteForceOracle)
{
    Rng rng(41);
    for (int i = 0; i < 3000; ++i) {
        const auto ev = tello::testing::random_event_log(rng, 8);
        ASSERT_EQ(score_2023(ev).autonomous_subtotal, tello::testing::oracle_score_2023(ev));
    }
}

TEST(Scoring, MonotonicityAndClamp)
{
    Rng rng(43);
    for (int i = 0; i < 2000; ++i) {
        auto ev = tello::testing::random_event_log(rng, 8);
        const int base = score_2023(ev).total;
        ASSERT_GE(score_2023(ev).autonomous_subtotal, 0);
        const double t = ev.empty() ? 0 : ev.back().t;

        auto leave = ev;
        leave.push_back(truth(t, EventKind::LineLeave));
        ASSERT_LE(score_2023(leave).total, base);

        auto more = ev;
        more.push_back(behavior(t, static_cast<BehaviorKind>(tello::testing::uniform_int(rng, 2, 5))));
        ASSERT_GE(score_2023(more).total, base);
    }
}

TEST(Scoring, ReportJsonIsStable)
{
    const std::string a = report_to_json(score_2023(perfect_run(), std::nullopt, 5));
    EXPECT_EQ(a, report_to_json(score_2023(perfect_run(), std::nullopt, 5)));
    EXPECT_NE(a.find("\"autonomous_subtotal\": 80"), std::string::npos);
    EXPECT_NE(a.find("\"total\": 85"), std::string::npos);
}

TEST(Coverage, FullLineTrace)
{
    const CourseSpec c = load_course_file(kData / "course_2023.json");
    std::vector<PoseSample> samples;
    const double len = c.line.length();
    for (double s = 0; s <= len; s += 0.02) {
        const auto p = line_point_at(c.line, s);
        const auto proj = line_nearest(c, p);
        samples.push_back({s, {p.x, p.y, 1.2, proj.tangent_deg}});
    }
    const CoverageTrace t = build_coverage_trace(samples, c);
    EXPECT_DOUBLE_EQ(t.covered_fraction, 1.0);
    EXPECT_DOUBLE_EQ(t.heading_aligned_fraction, 1.0);
    EXPECT_EQ(t.bins, static_cast<std::size_t>(std::ceil(len / kCoverageBin)));
}

TEST(Coverage, StationaryHoverCoversOneBin)
{
    const CourseSpec c = load_course_file(kData / "course_2023.json");
    const auto p = c.line.points.front();
    const CoverageTrace t = build_coverage_trace({{0, {p.x, p.y, 1, 0}}, {1, {p.x, p.y, 1, 0}}}, c);
    EXPECT_DOUBLE_EQ(t.covered_fraction, 1.0 / static_cast<double>(t.bins));
}

TEST(Coverage, MisalignedAndFarSamples)
{
    const CourseSpec c = load_course_file(kData / "course_2023.json");
    const CoverageTrace t = build_coverage_trace({{0, {0.5, 1.0, 1, 90}}, {1, {0.8, 2.0, 1, 0}}}, c);
    EXPECT_DOUBLE_EQ(t.covered_fraction, 1.0 / static_cast<double>(t.bins));
    EXPECT_DOUBLE_EQ(t.heading_aligned_fraction, 0.0);
    EXPECT_THROW(build_coverage_trace({}, c), ScoringError);
}
