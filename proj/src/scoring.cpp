#include "tello_arena/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

namespace tello {

namespace {

bool is_truth(const MissionEvent& e) { return e.source == EventSource::SimulatorTruth; }

void check_inputs(const std::vector<MissionEvent>& events, int interview)
{
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].t < events[i - 1].t)
            throw ScoringError(ScoringErrc::UnorderedEvents,
                               "event " + std::to_string(i + 1) + " is earlier than its predecessor");
    }
    if (interview < 0 || interview > 30)
        throw ScoringError(ScoringErrc::InterviewOutOfRange, "interview points must be within 0..30");
}

void finish(ScoreReport& r, int interview)
{
    int sum = 0;
    for (const auto& item : r.line_items)
        sum += item.points;
    r.autonomous_subtotal = std::max(0, sum);
    r.interview_points = interview;
    r.total = r.autonomous_subtotal + interview;
}

bool valid_recording(const std::vector<MissionEvent>& events)
{
    bool started = false;
    for (const auto& e : events) {
        if (e.kind == EventKind::RecordingStarted && e.verified && e.detail == "red-rectangle")
            started = true;
        if (e.kind == EventKind::RecordingStopped && started && e.verified && e.detail == "blue-rectangle" &&
            e.index > 0)
            return true;
    }
    return false;
}

}  // namespace

const std::vector<RubricRule>& rubric_2023()
{
    static const std::vector<RubricRule> rules = {
        {"R1", "successful take-off, +5 once"},
        {"R2", "altitude change or spin behavior, +5 per distinct behavior"},
        {"R3", "line leave, -5 each"},
        {"R4", "line following tier 15/20/25 at 50/75/95% coverage with 80% heading alignment"},
        {"R5", "valid recording between red and blue rectangles, +10"},
        {"R6", "landing precision, +10 within 10 cm, +5 within 20 cm"},
        {"R7", "victim pickup, +10 once"},
    };
    return rules;
}

const std::vector<RubricRule>& rubric_rings()
{
    static const std::vector<RubricRule> rules = {
        {"P1", "navigated phase, +10 per distinct phase 0..6"},
        {"P2", "ring touch, -2 each"},
    };
    return rules;
}

int landing_points(double distance_cm)
{
    if (distance_cm <= 10.0)
        return 10;
    if (distance_cm <= 20.0)
        return 5;
    return 0;
}

int judge_landing(Vec2 final_position, Vec2 goal_center)
{
    return landing_points((final_position - goal_center).norm() * 100.0);
}

int following_points(double covered, double aligned)
{
    if (aligned < 0.8)
        return 0;
    if (covered >= 0.95)
        return 25;
    if (covered >= 0.75)
        return 20;
    if (covered >= 0.50)
        return 15;
    return 0;
}

CoverageTrace build_coverage_trace(const std::vector<PoseSample>& samples, const CourseSpec& course)
{
    if (samples.empty())
        throw ScoringError(ScoringErrc::EmptySampleSet, "no pose samples");
    const double length = course.line.length();
    const std::size_t bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / kCoverageBin - 1e-9)));
    std::vector<char> covered(bins, 0), aligned(bins, 0);
    for (const auto& s : samples) {
        const LineProjection proj = line_nearest(course.line, {s.pose.x, s.pose.y});
        if (proj.distance > kCoverageTolerance)
            continue;
        const auto bin = std::min(bins - 1, static_cast<std::size_t>(proj.arclength / kCoverageBin));
        covered[bin] = 1;
        if (std::abs(wrap_degrees(s.pose.yaw_deg - proj.tangent_deg)) <= kHeadingTolerance)
            aligned[bin] = 1;
    }
    CoverageTrace trace;
    trace.bins = bins;
    trace.samples = samples.size();
    trace.covered_fraction = static_cast<double>(std::count(covered.begin(), covered.end(), 1)) / bins;
    trace.heading_aligned_fraction = static_cast<double>(std::count(aligned.begin(), aligned.end(), 1)) / bins;
    return trace;
}

ScoreReport score_2023(const std::vector<MissionEvent>& events, std::optional<CoverageTrace> trace, int interview)
{
    check_inputs(events, interview);
    ScoreReport r;
    r.profile = ScoreProfile::Vision2023;

    int takeoffs = 0;
    std::set<BehaviorKind> behaviors;
    int leaves = 0;
    std::optional<double> landed;
    bool victim = false;
    std::optional<CoverageTrace> logged;
    for (const auto& e : events) {
        if (!is_truth(e))
            continue;
        switch (e.kind) {
        case EventKind::TakeOff: ++takeoffs; break;
        case EventKind::BehaviorCompleted:
            if (e.behavior == BehaviorKind::AscendHigh || e.behavior == BehaviorKind::DescendLow ||
                e.behavior == BehaviorKind::Spin360Left || e.behavior == BehaviorKind::Spin360Right)
                behaviors.insert(e.behavior);
            break;
        case EventKind::LineLeave: ++leaves; break;
        case EventKind::Landed:
            if (!landed)
                landed = e.distance_cm;
            break;
        case EventKind::VictimPickup: victim = true; break;
        case EventKind::Coverage: logged = CoverageTrace{e.covered, e.aligned, 0, 0}; break;
        default: break;
        }
    }

    if (!trace)
        trace = logged;

    if (takeoffs > 0)
        r.line_items.push_back({"R1", "take-off", 5});
    if (takeoffs > 1)
        r.warnings.push_back("multiple take-offs, scored once");
    for (BehaviorKind b : behaviors)
        r.line_items.push_back({"R2", std::string("behavior ") + to_string(b), 5});
    for (int i = 0; i < leaves; ++i)
        r.line_items.push_back({"R3", "line leave", -5});
    if (trace) {
        const int pts = following_points(trace->covered_fraction, trace->heading_aligned_fraction);
        if (pts > 0)
            r.line_items.push_back({"R4", "line following", pts});
    }
    if (valid_recording(events))
        r.line_items.push_back({"R5", "video recording", 10});
    if (landed) {
        const int pts = landing_points(*landed);
        if (pts > 0)
            r.line_items.push_back({"R6", "landing", pts});
    }
    if (victim)
        r.line_items.push_back({"R7", "victim pickup", 10});
    finish(r, interview);
    return r;
}

ScoreReport score_rings(const std::vector<MissionEvent>& events, int interview)
{
    check_inputs(events, interview);
    ScoreReport r;
    r.profile = ScoreProfile::Rings;
    std::set<int> phases;
    int touches = 0;
    for (const auto& e : events) {
        if (!is_truth(e))
            continue;
        if (e.kind == EventKind::PhaseComplete && e.index >= 0 && e.index < kRingPhases)
            phases.insert(e.index);
        else if (e.kind == EventKind::RingTouch)
            ++touches;
    }
    for (int p : phases)
        r.line_items.push_back({"P1", "phase " + std::to_string(p), 10});
    for (int i = 0; i < touches; ++i)
        r.line_items.push_back({"P2", "ring touch", -kRingTouchPenalty});
    finish(r, interview);
    return r;
}

std::string report_to_json(const ScoreReport& report)
{
    nlohmann::ordered_json j;
    j["profile"] = report.profile == ScoreProfile::Vision2023 ? "2023" : "rings";
    j["line_items"] = nlohmann::ordered_json::array();
    for (const auto& item : report.line_items) {
        nlohmann::ordered_json li;
        li["rule"] = item.rule;
        li["label"] = item.label;
        li["points"] = item.points;
        j["line_items"].push_back(li);
    }
    j["autonomous_subtotal"] = report.autonomous_subtotal;
    j["interview_points"] = report.interview_points;
    j["total"] = report.total;
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

}  // namespace tello
