#pragma once

#include <optional>

#include "tello_arena/vision.hpp"

namespace tello {

enum class BehaviorKind {
    StartRecording,
    StopRecording,
    AscendHigh,
    DescendLow,
    Spin360Left,
    Spin360Right,
    PickVictim,
    LandGoal,
};

const char* to_string(BehaviorKind b);
std::optional<BehaviorKind> behavior_from_string(const char* name);

/// The marker table of the vision challenge; any other (shape, color) pair maps to nothing.
std::optional<BehaviorKind> marker_semantics(ShapeClass shape, ColorClass color);

}  // namespace tello
