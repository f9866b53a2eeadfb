#pragma once

// Rubric evaluation over mission event logs.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tello_arena/course.hpp"
#include "tello_arena/events.hpp"
#include "tello_arena/render.hpp"

namespace tello {

enum class ScoreProfile { Vision2023, Rings };

struct LineItem {
    std::string rule;   // rubric rule id, e.g. "R2"
    std::string label;
    int points = 0;
    bool operator==(const LineItem&) const = default;
};

struct ScoreReport {
    ScoreProfile profile = ScoreProfile::Vision2023;
    std::vector<LineItem> line_items;
    int autonomous_subtotal = 0;  // clamped at zero
    int interview_points = 0;
    int total = 0;
    std::vector<std::string> warnings;
};

struct CoverageTrace {
    double covered_fraction = 0;
    double heading_aligned_fraction = 0;
    std::size_t bins = 0;
    std::size_t samples = 0;
};

struct PoseSample {
    double t = 0;
    Pose pose;
};

enum class ScoringErrc { UnorderedEvents, EmptySampleSet, InterviewOutOfRange };

class ScoringError : public std::runtime_error {
public:
    ScoringError(ScoringErrc code, const std::string& detail) : std::runtime_error(detail), code_(code) {}
    ScoringErrc code() const noexcept { return code_; }

private:
    ScoringErrc code_;
};

struct RubricRule {
    const char* id;
    const char* description;
};
/// Every rule of the 2023 rubric, in report order.
const std::vector<RubricRule>& rubric_2023();
const std::vector<RubricRule>& rubric_rings();

inline constexpr double kCoverageBin = 0.05;        // m of arclength
inline constexpr double kCoverageTolerance = 0.15;  // m from the line
inline constexpr double kHeadingTolerance = 30.0;   // degrees
inline constexpr int kRingTouchPenalty = 2;
inline constexpr int kRingPhases = 7;

int judge_landing(Vec2 final_position, Vec2 goal_center);
int landing_points(double distance_cm);
int following_points(double covered_fraction, double aligned_fraction);

CoverageTrace build_coverage_trace(const std::vector<PoseSample>& samples, const CourseSpec& course);

/// With no trace given, the last simulator Coverage event is used.
ScoreReport score_2023(const std::vector<MissionEvent>& events, std::optional<CoverageTrace> trace = std::nullopt,
                       int interview = 0);
ScoreReport score_rings(const std::vector<MissionEvent>& events, int interview = 0);

std::string report_to_json(const ScoreReport& report);

}  // namespace tello
