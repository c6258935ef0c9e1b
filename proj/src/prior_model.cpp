#include "roma/prior_model.hpp"

#include "roma/kernels.hpp"
#include "roma/mot_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace roma {

std::size_t PriorModel::rank_of(std::size_t detector) const {
    auto it = std::find(detector_order.begin(), detector_order.end(), detector);
    if (it == detector_order.end())
        throw ConfigError("detector " + std::to_string(detector) + " is not in the detector order");
    return static_cast<std::size_t>(it - detector_order.begin());
}

void PriorModel::validate() const {
    boundaries.validate();
    if (matrix.empty())
        throw ConfigError("prior matrix has no rows");
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        const auto &row = matrix[i];
        if (row.size() != regions())
            throw ConfigError("prior row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                              " entries, expected " + std::to_string(regions()));
        bool positive = false;
        for (double v : row) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ConfigError("prior row " + std::to_string(i) + " has a negative or non-finite entry");
            positive = positive || v > 0.0;
        }
        if (!positive)
            throw ConfigError("prior row " + std::to_string(i) + " has no positive entry");
    }
    std::vector<std::size_t> sorted = detector_order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> expected(matrix.size());
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    if (sorted != expected)
        throw ConfigError("detector order must be a permutation of the prior rows");
}

PriorModel build_prior(std::span<const DetectionTrace> traces, const RegionBoundaries &boundaries,
                       const VideoMeta &frame, double confidence_threshold) {
    if (traces.empty())
        throw DataError("cannot build a prior from zero traces");
    boundaries.validate();
    const std::size_t frames = traces.front().frame_count();
    if (frames == 0)
        throw DataError("cannot build a prior from empty traces");
    for (const auto &t : traces) {
        if (t.frame_count() != frames)
            throw DataError("trace '" + t.name() + "' covers " + std::to_string(t.frame_count()) +
                            " frames, expected " + std::to_string(frames));
    }

    PriorModel prior;
    prior.boundaries = boundaries;
    const auto scaled = boundaries.scaled_to(frame.width, frame.height);
    for (const auto &t : traces)
        prior.matrix.push_back(kernels::region_counts_omp(t.frames(), scaled, confidence_threshold));

    prior.detector_order.resize(traces.size());
    std::iota(prior.detector_order.begin(), prior.detector_order.end(), std::size_t{0});
    std::stable_sort(prior.detector_order.begin(), prior.detector_order.end(), [&](std::size_t a, std::size_t b) {
        return traces[a].latency_profile().nominal() < traces[b].latency_profile().nominal();
    });
    return prior;
}

std::vector<double> detection_ratio(const PriorModel &prior, std::size_t i, std::size_t c) {
    if (i >= prior.detectors() || c >= prior.detectors())
        throw ConfigError("detector index out of range");
    const auto &num = prior.matrix[i];
    const auto &den = prior.matrix[c];
    std::vector<double> r(num.size());
    for (std::size_t k = 0; k < num.size(); ++k) {
        if (den[k] != 0.0)
            r[k] = num[k] / den[k];
        else
            r[k] = num[k] == 0.0 ? 1.0 : num[k] / kRatioZeroGuard;
    }
    return r;
}

double estimate_detected(std::span<const double> ratio, const SizeHistogram &observed) {
    if (ratio.size() != observed.counts.size())
        throw ConfigError("ratio and histogram lengths differ");
    return std::inner_product(ratio.begin(), ratio.end(), observed.counts.begin(), 0.0);
}

void write_prior(std::ostream &out, const PriorModel &prior) {
    out << "roma-prior 1\n";
    out << "detectors " << prior.detectors() << '\n';
    out << "regions " << prior.regions() << '\n';
    out << "thresholds";
    for (double t : prior.boundaries.thresholds)
        out << ' ' << format_double(t);
    out << '\n';
    out << "reference " << format_double(prior.boundaries.reference_width) << ' '
        << format_double(prior.boundaries.reference_height) << '\n';
    out << "order";
    for (auto i : prior.detector_order)
        out << ' ' << i;
    out << '\n';
    for (const auto &row : prior.matrix) {
        out << "row";
        for (double v : row)
            out << ' ' << format_double(v);
        out << '\n';
    }
}

namespace {

std::istringstream expect_line(std::istream &in, std::size_t &line_no, const std::string &key) {
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream fields(line);
        std::string got;
        fields >> got;
        if (got != key)
            throw ParseError(line_no, "expected '" + key + "', found '" + got + "'");
        return fields;
    }
    throw ParseError(line_no + 1, "unexpected end of prior file, expected '" + key + "'");
}

template <typename T>
std::vector<T> read_values(std::istringstream &fields, std::size_t count, std::size_t line_no) {
    std::vector<T> values(count);
    for (auto &v : values) {
        if (!(fields >> v))
            throw ParseError(line_no, "expected " + std::to_string(count) + " values");
    }
    std::string extra;
    if (fields >> extra)
        throw ParseError(line_no, "unexpected trailing value '" + extra + "'");
    return values;
}

} // namespace

PriorModel read_prior(std::istream &in) {
    std::size_t line_no = 0;
    auto header = expect_line(in, line_no, "roma-prior");
    int version = 0;
    if (!(header >> version) || version != 1)
        throw ParseError(line_no, "unsupported prior file version");

    auto n_line = expect_line(in, line_no, "detectors");
    const auto n = read_values<std::size_t>(n_line, 1, line_no)[0];
    auto h_line = expect_line(in, line_no, "regions");
    const auto h = read_values<std::size_t>(h_line, 1, line_no)[0];
    if (n == 0 || h == 0)
        throw ParseError(line_no, "detector and region counts must be positive");

    PriorModel prior;
    auto t_line = expect_line(in, line_no, "thresholds");
    prior.boundaries.thresholds = read_values<double>(t_line, h - 1, line_no);
    auto ref_line = expect_line(in, line_no, "reference");
    auto ref = read_values<double>(ref_line, 2, line_no);
    prior.boundaries.reference_width = ref[0];
    prior.boundaries.reference_height = ref[1];
    auto order_line = expect_line(in, line_no, "order");
    prior.detector_order = read_values<std::size_t>(order_line, n, line_no);
    for (std::size_t i = 0; i < n; ++i) {
        auto row_line = expect_line(in, line_no, "row");
        prior.matrix.push_back(read_values<double>(row_line, h, line_no));
    }
    prior.validate();
    return prior;
}

PriorModel load_prior(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open prior file '" + path + "'");
    return read_prior(in);
}

void save_prior(const std::string &path, const PriorModel &prior) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write prior file '" + path + "'");
    write_prior(out, prior);
}

} // namespace roma
