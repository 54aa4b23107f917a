#include "szilard/protocol.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "szilard/physics.hpp"

namespace szilard {
namespace {

constexpr double kDurationSlack = 1e-9;  // tolerated mismatch in duration bookkeeping
constexpr double kAnchorSlack = 1e-9;

double segment_start(const Segment& s) {
    if (const auto* j = std::get_if<JumpSegment>(&s)) return j->from;
    return std::get<RampSegment>(s).samples.front()[1];
}

double segment_end(const Segment& s) {
    if (const auto* j = std::get_if<JumpSegment>(&s)) return j->to;
    return std::get<RampSegment>(s).samples.back()[1];
}

}  // namespace

double Protocol::start_level() const {
    if (segments.empty()) throw ProtocolError("segments: empty protocol has no start level");
    return segment_start(segments.front());
}

double Protocol::end_level() const {
    if (segments.empty()) throw ProtocolError("segments: empty protocol has no end level");
    return segment_end(segments.back());
}

void validate(const Protocol& protocol, const ValidateOptions& options) {
    if (protocol.branch != 0 && protocol.branch != 1)
        throw ProtocolError("branch: must be 0 or 1");
    if (!std::isfinite(protocol.gamma_tau) || protocol.gamma_tau < 0.0)
        throw ProtocolError("gamma_tau: must be finite and non-negative");
    if (protocol.segments.empty())
        throw ProtocolError("segments: must not be empty");

    double ramp_total = 0.0;
    for (std::size_t i = 0; i < protocol.segments.size(); ++i) {
        const auto where = [&](const char* field) {
            std::ostringstream msg;
            msg << "segments[" << i << "]." << field;
            return msg.str();
        };
        const Segment& seg = protocol.segments[i];
        if (const auto* jump = std::get_if<JumpSegment>(&seg)) {
            if (!std::isfinite(jump->from) || !std::isfinite(jump->to))
                throw ProtocolError(where("from/to") + ": must be finite");
        } else {
            const auto& ramp = std::get<RampSegment>(seg);
            if (!std::isfinite(ramp.duration) || ramp.duration < 0.0)
                throw ProtocolError(where("duration") + ": must be finite and non-negative");
            if (ramp.samples.size() < 2)
                throw ProtocolError(where("samples") + ": need at least two samples");
            if (std::abs(ramp.samples.front()[0]) > kDurationSlack)
                throw ProtocolError(where("samples") + ": first sample time must be 0");
            for (std::size_t k = 0; k < ramp.samples.size(); ++k) {
                if (!std::isfinite(ramp.samples[k][0]) || !std::isfinite(ramp.samples[k][1]))
                    throw ProtocolError(where("samples") + ": non-finite entry");
                if (k > 0 && !(ramp.samples[k][0] > ramp.samples[k - 1][0]))
                    throw ProtocolError(where("samples") + ": times must be strictly increasing");
            }
            const double span = ramp.samples.back()[0];
            if (std::abs(span - ramp.duration) >
                kDurationSlack * std::max(1.0, std::abs(ramp.duration)))
                throw ProtocolError(where("samples") + ": last sample time must equal duration");
            ramp_total += ramp.duration;
        }
        if (i > 0) {
            const double prev = segment_end(protocol.segments[i - 1]);
            const double cur = segment_start(seg);
            if (std::abs(prev - cur) > kAnchorSlack)
                throw ProtocolError(where("") + "continuity: segment start does not match previous end");
        }
    }

    if (std::abs(ramp_total - protocol.gamma_tau) >
        kDurationSlack * std::max(1.0, protocol.gamma_tau))
        throw ProtocolError("gamma_tau: does not equal the sum of ramp durations");

    if (options.require_rest_anchor) {
        if (std::abs(protocol.start_level() - kLn2) > kAnchorSlack)
            throw ProtocolError("segments: protocol must start at the rest level ln 2");
        if (std::abs(protocol.end_level() - kLn2) > kAnchorSlack)
            throw ProtocolError("segments: protocol must end at the rest level ln 2");
    }
}

std::string protocol_to_json(const Protocol& protocol) {
    nlohmann::ordered_json root;
    root["branch"] = protocol.branch;
    root["gamma_tau"] = protocol.gamma_tau;
    root["segments"] = nlohmann::ordered_json::array();
    for (const Segment& seg : protocol.segments) {
        nlohmann::ordered_json s;
        if (const auto* jump = std::get_if<JumpSegment>(&seg)) {
            s["kind"] = "jump";
            s["from"] = jump->from;
            s["to"] = jump->to;
        } else {
            const auto& ramp = std::get<RampSegment>(seg);
            s["kind"] = "ramp";
            s["duration"] = ramp.duration;
            s["samples"] = ramp.samples;
        }
        root["segments"].push_back(std::move(s));
    }
    return root.dump(2) + "\n";
}

Protocol protocol_from_json(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("json: ") + e.what());
    }

    const auto require = [](const nlohmann::json& obj, const char* field,
                            const std::string& context) -> const nlohmann::json& {
        auto it = obj.find(field);
        if (it == obj.end()) throw ProtocolError(context + field + ": missing");
        return *it;
    };

    Protocol protocol;
    try {
        protocol.branch = require(root, "branch", "").get<int>();
        protocol.gamma_tau = require(root, "gamma_tau", "").get<double>();
        const auto& segments = require(root, "segments", "");
        if (!segments.is_array()) throw ProtocolError("segments: must be an array");
        for (std::size_t i = 0; i < segments.size(); ++i) {
            std::ostringstream ctx;
            ctx << "segments[" << i << "].";
            const auto& s = segments[i];
            const std::string kind = require(s, "kind", ctx.str()).get<std::string>();
            if (kind == "jump") {
                JumpSegment jump;
                jump.from = require(s, "from", ctx.str()).get<double>();
                jump.to = require(s, "to", ctx.str()).get<double>();
                protocol.segments.emplace_back(jump);
            } else if (kind == "ramp") {
                RampSegment ramp;
                ramp.duration = require(s, "duration", ctx.str()).get<double>();
                ramp.samples =
                    require(s, "samples", ctx.str()).get<std::vector<std::array<double, 2>>>();
                protocol.segments.emplace_back(std::move(ramp));
            } else {
                throw ProtocolError(ctx.str() + "kind: must be \"jump\" or \"ramp\"");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("json type: ") + e.what());
    }
    validate(protocol, ValidateOptions{.require_rest_anchor = false});
    return protocol;
}

Protocol load_protocol(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProtocolError("file: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return protocol_from_json(buf.str());
}

void save_protocol(const std::string& path, const Protocol& protocol) {
    std::ofstream out(path);
    if (!out) throw ProtocolError("file: cannot write " + path);
    out << protocol_to_json(protocol);
}

}  // namespace szilard
