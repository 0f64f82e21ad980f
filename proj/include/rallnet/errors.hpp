#pragma once

#include <stdexcept>
#include <string>

namespace rallnet {

// Thrown when topology generation cannot produce a sink-connected graph
// within the retry budget (range too small for the node count / area).
struct GenerationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No directed path from a source to the sink.
struct Unreachable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A path whose consecutive links do not chain head-to-tail.
struct InvalidPath : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact solver asked for an instance above its node cap.
struct TooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A routing table does not cover every non-sink node of the topology.
struct RoutesIncomplete : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A metric that divides by generated or delivered packet counts saw zero.
struct NoTraffic : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownAlgorithm : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rallnet
