#include "roma/mot_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace roma {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

bool to_double(std::string_view s, double &out) {
    if (s.empty())
        return false;
    if (s.front() == '+')
        s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::ifstream open_or_throw(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open '" + path + "'");
    return in;
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

MotParseResult parse_mot(std::istream &in, MotKind kind) {
    MotParseResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = trim(line);
        if (view.empty())
            continue;
        auto fields = split_fields(view);
        if (fields.size() < 7)
            throw ParseError(line_no, "expected at least 7 comma-separated fields, got " +
                                          std::to_string(fields.size()));
        double values[7];
        for (int k = 0; k < 7; ++k) {
            if (!to_double(fields[k], values[k]))
                throw ParseError(line_no, "field " + std::to_string(k + 1) + " is not a number: '" +
                                              std::string(fields[k]) + "'");
        }
        const double frame = values[0];
        if (frame < 1.0 || frame != static_cast<double>(static_cast<long long>(frame)))
            throw ParseError(line_no, "frame number must be a positive integer");
        const double conf = values[6];
        if (kind == MotKind::ground_truth && conf == 0.0)
            continue;
        BoundingBox box{values[2], values[3], values[4], values[5], std::clamp(conf, 0.0, 1.0)};
        if (!box.valid()) {
            ++result.rejected_rows;
            continue;
        }
        result.frames[static_cast<std::size_t>(frame) - 1].push_back(box);
    }
    return result;
}

MotParseResult parse_mot_string(const std::string &text, MotKind kind) {
    std::istringstream in(text);
    return parse_mot(in, kind);
}

MotParseResult read_mot_file(const std::string &path, MotKind kind) {
    auto in = open_or_throw(path);
    try {
        return parse_mot(in, kind);
    } catch (const ParseError &e) {
        throw ParseError(e.line(), path + ": " + e.detail());
    }
}

namespace {

void write_row(std::ostream &out, std::size_t frame, const BoundingBox &b) {
    out << (frame + 1) << ",-1," << format_double(b.left) << ',' << format_double(b.top) << ','
        << format_double(b.width) << ',' << format_double(b.height) << ',' << format_double(b.confidence)
        << ",-1,-1,-1\n";
}

} // namespace

void write_mot(std::ostream &out, const FrameBoxMap &frames) {
    for (const auto &[frame, boxes] : frames)
        for (const auto &b : boxes)
            write_row(out, frame, b);
}

void write_mot(std::ostream &out, const std::vector<BoxList> &dense) {
    for (std::size_t frame = 0; frame < dense.size(); ++frame)
        for (const auto &b : dense[frame])
            write_row(out, frame, b);
}

LatencyProfile parse_latency_sidecar(std::istream &in, std::size_t frame_count) {
    std::vector<double> latency(frame_count, -1.0);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = trim(line);
        if (view.empty())
            continue;
        auto fields = split_fields(view);
        double frame = 0.0;
        double seconds = 0.0;
        if (fields.size() < 2 || !to_double(fields[0], frame) || !to_double(fields[1], seconds)) {
            if (line_no == 1)
                continue; // header
            throw ParseError(line_no, "expected 'frame_index,latency_seconds'");
        }
        if (frame < 0.0 || frame != static_cast<double>(static_cast<long long>(frame)))
            throw ParseError(line_no, "frame index must be a non-negative integer");
        if (!(seconds >= 0.0))
            throw ParseError(line_no, "latency must be non-negative");
        auto f = static_cast<std::size_t>(frame);
        if (f >= frame_count)
            throw ParseError(line_no, "frame index " + std::to_string(f) + " beyond frame count " +
                                          std::to_string(frame_count));
        latency[f] = seconds;
    }
    for (std::size_t f = 0; f < frame_count; ++f) {
        if (latency[f] < 0.0)
            throw DataError("latency sidecar has no entry for frame " + std::to_string(f));
    }
    return LatencyProfile(std::move(latency));
}

LatencyProfile read_latency_sidecar(const std::string &path, std::size_t frame_count) {
    auto in = open_or_throw(path);
    try {
        return parse_latency_sidecar(in, frame_count);
    } catch (const ParseError &e) {
        throw ParseError(e.line(), path + ": " + e.detail());
    }
}

void write_latency_sidecar(std::ostream &out, const LatencyProfile &latency, std::size_t frame_count) {
    out << "frame_index,latency_seconds\n";
    for (std::size_t f = 0; f < frame_count; ++f)
        out << f << ',' << format_double(latency.at(f)) << '\n';
}

} // namespace roma
