#ifndef MHK_DATA_HPP
#define MHK_DATA_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mhk/core.hpp"

namespace mhk {

struct MatrixSample {
    Mat x;
    int label = 0;
};

struct Dataset {
    std::vector<MatrixSample> samples;
    std::string name;

    Eigen::Index rows() const { return samples.empty() ? 0 : samples.front().x.rows(); }
    Eigen::Index cols() const { return samples.empty() ? 0 : samples.front().x.cols(); }
    std::size_t size() const { return samples.size(); }

    void validate() const {
        require(!samples.empty(), "Dataset: empty");
        for (const auto& s : samples) {
            require_same_shape(samples.front().x, s.x, "Dataset");
            require(s.label >= 0, "Dataset: negative label");
        }
    }

    std::vector<Mat> matrices() const {
        std::vector<Mat> out;
        out.reserve(samples.size());
        for (const auto& s : samples) out.push_back(s.x);
        return out;
    }

    std::vector<int> labels() const {
        std::vector<int> out;
        out.reserve(samples.size());
        for (const auto& s : samples) out.push_back(s.label);
        return out;
    }
};

// ---------------------------------------------------------------------------
// IDX (big-endian u32 header, u8 pixels)

namespace detail {

inline std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t off) {
    require(off + 4 <= b.size(), "IDX: truncated header");
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

inline void write_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    b.push_back(std::uint8_t(v >> 24));
    b.push_back(std::uint8_t(v >> 16));
    b.push_back(std::uint8_t(v >> 8));
    b.push_back(std::uint8_t(v));
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open file: " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

}  // namespace detail

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

inline Dataset parse_idx(const std::vector<std::uint8_t>& image_bytes,
                         const std::vector<std::uint8_t>& label_bytes) {
    require(detail::read_be32(image_bytes, 0) == kIdxImageMagic, "IDX: bad image magic");
    require(detail::read_be32(label_bytes, 0) == kIdxLabelMagic, "IDX: bad label magic");
    const std::uint32_t count = detail::read_be32(image_bytes, 4);
    const std::uint32_t rows = detail::read_be32(image_bytes, 8);
    const std::uint32_t cols = detail::read_be32(image_bytes, 12);
    const std::uint32_t label_count = detail::read_be32(label_bytes, 4);
    require(count == label_count, "IDX: image/label count mismatch");
    require(count > 0, "IDX: empty dataset");
    const std::size_t need = 16 + std::size_t(count) * rows * cols;
    require(image_bytes.size() >= need, "IDX: truncated image payload");
    require(label_bytes.size() >= 8 + count, "IDX: truncated label payload");

    Dataset d;
    d.name = "idx";
    d.samples.resize(count);
    std::size_t off = 16;
    for (std::uint32_t k = 0; k < count; ++k) {
        Mat m(rows, cols);
        for (std::uint32_t i = 0; i < rows; ++i)
            for (std::uint32_t j = 0; j < cols; ++j)
                m(i, j) = double(image_bytes[off++]);
        d.samples[k].x = std::move(m);
        d.samples[k].label = int(label_bytes[8 + k]);
    }
    return d;
}

inline Dataset load_idx(const std::string& image_path, const std::string& label_path) {
    Dataset d = parse_idx(detail::read_file_bytes(image_path),
                          detail::read_file_bytes(label_path));
    d.name = std::filesystem::path(image_path).stem().string();
    return d;
}

/// Serializes a dataset of byte-valued matrices back to the IDX pair.
inline void write_idx(const Dataset& d, const std::string& image_path,
                      const std::string& label_path) {
    d.validate();
    std::vector<std::uint8_t> img, lab;
    detail::write_be32(img, kIdxImageMagic);
    detail::write_be32(img, std::uint32_t(d.size()));
    detail::write_be32(img, std::uint32_t(d.rows()));
    detail::write_be32(img, std::uint32_t(d.cols()));
    detail::write_be32(lab, kIdxLabelMagic);
    detail::write_be32(lab, std::uint32_t(d.size()));
    for (const auto& s : d.samples) {
        for (Eigen::Index i = 0; i < s.x.rows(); ++i)
            for (Eigen::Index j = 0; j < s.x.cols(); ++j) {
                double v = s.x(i, j);
                require(v >= 0.0 && v <= 255.0 && v == std::floor(v),
                        "write_idx: pixel values must be integers in [0, 255]");
                img.push_back(std::uint8_t(v));
            }
        require(s.label >= 0 && s.label <= 255, "write_idx: label out of byte range");
        lab.push_back(std::uint8_t(s.label));
    }
    std::ofstream(image_path, std::ios::binary).write(reinterpret_cast<const char*>(img.data()), std::streamsize(img.size()));
    std::ofstream(label_path, std::ios::binary).write(reinterpret_cast<const char*>(lab.data()), std::streamsize(lab.size()));
}

// ---------------------------------------------------------------------------
// binary PGM (P5), maxval <= 255

inline Mat parse_pgm(const std::vector<std::uint8_t>& bytes, const std::string& what) {
    std::string header(bytes.begin(), bytes.end());
    std::istringstream in(header);
    std::string magic;
    in >> magic;
    require(magic == "P5", what + ": not a binary PGM (P5) file");
    auto next_token = [&in, &what]() {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') { std::string rest; std::getline(in, rest); continue; }
            return tok;
        }
        throw std::invalid_argument(what + ": truncated PGM header");
    };
    const int w = std::stoi(next_token());
    const int h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    require(w > 0 && h > 0, what + ": bad PGM dimensions");
    require(maxval > 0 && maxval <= 255, what + ": unsupported PGM depth (maxval > 255)");
    std::size_t off = std::size_t(in.tellg()) + 1;  // single whitespace after maxval
    require(bytes.size() >= off + std::size_t(w) * h, what + ": truncated PGM payload");
    Mat m(h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j)
            m(i, j) = double(bytes[off++]);
    return m;
}

/// Loads every *.pgm in a directory (sorted by filename); label_rule maps the
/// filename to a class and may throw for unmatched names.
inline Dataset load_pgm_dir(const std::string& path,
                            const std::function<int(const std::string&)>& label_rule) {
    std::vector<std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(path))
        if (e.is_regular_file() && e.path().extension() == ".pgm")
            files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    require(!files.empty(), "load_pgm_dir: no .pgm files in " + path);
    Dataset d;
    d.name = std::filesystem::path(path).filename().string();
    for (const auto& f : files) {
        MatrixSample s;
        s.x = parse_pgm(detail::read_file_bytes(f), f);
        s.label = label_rule(std::filesystem::path(f).filename().string());
        require(s.label >= 0, "load_pgm_dir: negative label for " + f);
        if (!d.samples.empty())
            require(d.samples.front().x.rows() == s.x.rows() &&
                    d.samples.front().x.cols() == s.x.cols(),
                    "load_pgm_dir: heterogeneous image dimensions at " + f);
        d.samples.push_back(std::move(s));
    }
    return d;
}

// ---------------------------------------------------------------------------
// CSV matrix format: per sample a header line "m,n,label", then m rows of n
// comma-separated reals; samples separated by blank lines.

inline Dataset load_csv(std::istream& in, const std::string& name = "csv") {
    Dataset d;
    d.name = name;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream hs(line);
        std::string tok;
        std::vector<std::string> head;
        while (std::getline(hs, tok, ',')) head.push_back(tok);
        require(head.size() == 3, "CSV: expected header m,n,label");
        const int m = std::stoi(head[0]), n = std::stoi(head[1]), label = std::stoi(head[2]);
        require(m >= 1 && n >= 1, "CSV: bad sample dimensions");
        MatrixSample s;
        s.label = label;
        s.x.resize(m, n);
        for (int i = 0; i < m; ++i) {
            require(bool(std::getline(in, line)), "CSV: truncated sample rows");
            std::istringstream rs(line);
            for (int j = 0; j < n; ++j) {
                require(bool(std::getline(rs, tok, ',')), "CSV: short row");
                s.x(i, j) = std::stod(tok);
            }
        }
        d.samples.push_back(std::move(s));
    }
    d.validate();
    return d;
}

inline Dataset load_csv_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open file: " + path);
    return load_csv(in, std::filesystem::path(path).stem().string());
}

inline void save_csv(const Dataset& d, std::ostream& out) {
    for (const auto& s : d.samples) {
        out << s.x.rows() << "," << s.x.cols() << "," << s.label << "\n";
        for (Eigen::Index i = 0; i < s.x.rows(); ++i) {
            for (Eigen::Index j = 0; j < s.x.cols(); ++j) {
                if (j) out << ",";
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", s.x(i, j));
                out << buf;
            }
            out << "\n";
        }
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// normalization and split sampling

/// Affine map onto [0, 1] using the dataset-global min/max; a constant
/// dataset maps to all zeros.
inline Dataset normalize_unit(const Dataset& d) {
    d.validate();
    double lo = d.samples.front().x.minCoeff(), hi = d.samples.front().x.maxCoeff();
    for (const auto& s : d.samples) {
        lo = std::min(lo, s.x.minCoeff());
        hi = std::max(hi, s.x.maxCoeff());
    }
    Dataset out = d;
    if (hi == lo) {
        for (auto& s : out.samples) s.x.setZero();
        return out;
    }
    for (auto& s : out.samples) s.x = (s.x.array() - lo) / (hi - lo);
    return out;
}

struct SplitSpec {
    int train_per_class = 0;  // 0 = derive from train_total, balanced
    int train_total = 0;
    int test_total = 0;       // 0 = all remaining samples
    std::uint64_t seed = 0;
    int repetitions = 1;
};

/// Seeded deterministic split for repetition rep_index; the generator is
/// mt19937_64 seeded with (seed XOR rep_index). Train indices are balanced
/// per class; test indices are drawn from the pooled remainder.
inline std::pair<Dataset, Dataset> split_random(const Dataset& d, const SplitSpec& s,
                                                int rep_index) {
    d.validate();
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < d.samples.size(); ++i)
        by_class[d.samples[i].label].push_back(i);

    int per_class = s.train_per_class;
    if (per_class == 0) {
        require(s.train_total > 0, "split_random: no train size given");
        require(s.train_total % int(by_class.size()) == 0,
                "split_random: train_total not divisible by class count");
        per_class = s.train_total / int(by_class.size());
    }

    Rng rng(s.seed ^ std::uint64_t(rep_index));
    std::vector<std::size_t> train_idx, rest;
    for (auto& [label, idx] : by_class) {
        require(int(idx.size()) > per_class, "split_random: insufficient samples for class "
                + std::to_string(label));
        rng.shuffle(idx);
        train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + per_class);
        rest.insert(rest.end(), idx.begin() + per_class, idx.end());
    }
    std::vector<std::size_t> test_idx;
    if (s.test_total == 0) {
        test_idx = rest;
    } else {
        require(int(rest.size()) >= s.test_total, "split_random: insufficient test samples");
        rng.shuffle(rest);
        test_idx.assign(rest.begin(), rest.begin() + s.test_total);
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    Dataset train, test;
    train.name = d.name + "/train";
    test.name = d.name + "/test";
    for (auto i : train_idx) train.samples.push_back(d.samples[i]);
    for (auto i : test_idx) test.samples.push_back(d.samples[i]);
    return {train, test};
}

}  // namespace mhk

#endif  // MHK_DATA_HPP
