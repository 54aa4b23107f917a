#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

/// Control protocols for the dot level.  A protocol is a time-ordered list of
/// segments, each an instantaneous jump (zero duration, moves the level but
/// not the occupation) or a sampled ramp interpolated piecewise-linearly.
/// All energies are reduced (beta * eps), all times reduced (gamma * t).
///
/// The off-cycle rest level is ln 2 by definition of the cycle; a canonical
/// protocol starts and ends there.  Validation can relax that anchor for
/// miscalibration studies where the whole implemented path is offset.

namespace szilard {

struct JumpSegment {
    double from = 0.0;
    double to = 0.0;
};

struct RampSegment {
    double duration = 0.0;
    std::vector<std::array<double, 2>> samples;  // (time offset, level)
};

using Segment = std::variant<JumpSegment, RampSegment>;

struct Protocol {
    int branch = 0;  // measurement outcome this protocol serves
    double gamma_tau = 0.0;
    std::vector<Segment> segments;

    double start_level() const;
    double end_level() const;
};

/// Thrown on malformed protocols; the message names the offending field.
class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidateOptions {
    bool require_rest_anchor = true;  // endpoints must sit at ln 2
};

/// Full structural check: branch bit, duration bookkeeping, sample ordering,
/// continuity across segments, finite levels, rest anchoring.
void validate(const Protocol& protocol, const ValidateOptions& options = {});

/// JSON round trip in the cross-module file format:
/// {"branch":0|1,"gamma_tau":x,"segments":[{"kind":"jump","from":a,"to":b}
///  |{"kind":"ramp","duration":d,"samples":[[t,level],...]}]}
std::string protocol_to_json(const Protocol& protocol);
Protocol protocol_from_json(const std::string& text);

Protocol load_protocol(const std::string& path);
void save_protocol(const std::string& path, const Protocol& protocol);

}  // namespace szilard
