#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "biaskit/dataset.hpp"
#include "biaskit/schema.hpp"

namespace biaskit {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;  // 3-D tensor of unsigned bytes
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;  // 1-D vector of unsigned bytes

namespace detail {

inline std::vector<unsigned char> read_all_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path.string());
    }
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                      std::istreambuf_iterator<char>());
}

inline std::uint32_t read_be_u32(const std::vector<unsigned char>& bytes, std::size_t offset,
                                 const std::string& file) {
    if (offset + 4 > bytes.size()) {
        throw std::runtime_error(file + ": truncated IDX header");
    }
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

inline std::string hex_magic(std::uint32_t magic) {
    static const char* digits = "0123456789abcdef";
    std::string s = "0x";
    for (int shift = 28; shift >= 0; shift -= 4) s.push_back(digits[(magic >> shift) & 0xf]);
    return s;
}

}  // namespace detail

/// Loads an IDX image/label file pair (the MNIST container format): big-endian
/// 32-bit magic, big-endian 32-bit dimension sizes, then raw unsigned bytes.
/// Pixels become continuous features in [0, 1] (byte / 255); labels become the
/// dataset labels. Byte length must agree exactly with the declared counts.
inline Dataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path) {
    const auto image_bytes = detail::read_all_bytes(images_path);
    const auto label_bytes = detail::read_all_bytes(labels_path);
    const std::string images_name = images_path.string();
    const std::string labels_name = labels_path.string();

    const std::uint32_t images_magic = detail::read_be_u32(image_bytes, 0, images_name);
    if (images_magic != kIdxImagesMagic) {
        throw std::runtime_error(images_name + ": bad IDX magic " +
                                 detail::hex_magic(images_magic) + ", expected " +
                                 detail::hex_magic(kIdxImagesMagic));
    }
    const std::uint32_t labels_magic = detail::read_be_u32(label_bytes, 0, labels_name);
    if (labels_magic != kIdxLabelsMagic) {
        throw std::runtime_error(labels_name + ": bad IDX magic " +
                                 detail::hex_magic(labels_magic) + ", expected " +
                                 detail::hex_magic(kIdxLabelsMagic));
    }

    const std::uint64_t n_images = detail::read_be_u32(image_bytes, 4, images_name);
    const std::uint64_t rows = detail::read_be_u32(image_bytes, 8, images_name);
    const std::uint64_t cols = detail::read_be_u32(image_bytes, 12, images_name);
    const std::uint64_t n_labels = detail::read_be_u32(label_bytes, 4, labels_name);

    if (image_bytes.size() != 16 + n_images * rows * cols) {
        throw std::runtime_error(images_name + ": file size " +
                                 std::to_string(image_bytes.size()) +
                                 " disagrees with declared " + std::to_string(n_images) + "x" +
                                 std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (label_bytes.size() != 8 + n_labels) {
        throw std::runtime_error(labels_name + ": payload size disagrees with declared count " +
                                 std::to_string(n_labels));
    }
    if (n_images != n_labels) {
        throw std::runtime_error("IDX pair mismatch: " + std::to_string(n_images) + " images vs " +
                                 std::to_string(n_labels) + " labels");
    }
    if (n_images == 0) {
        throw std::runtime_error(images_name + ": IDX file declares zero examples");
    }

    const std::size_t n_pixels = static_cast<std::size_t>(rows * cols);

    Dataset ds;
    for (std::size_t p = 0; p < n_pixels; ++p) {
        ds.schema.columns.push_back({"px" + std::to_string(p), ColumnKind::continuous, {}});
    }

    // Label categories: the distinct byte values that occur, in numeric order.
    std::map<int, std::string> seen;
    for (std::size_t i = 0; i < n_labels; ++i) {
        const int v = label_bytes[8 + i];
        seen.emplace(v, std::to_string(v));
    }
    Column label_col{"label", ColumnKind::categorical, {}};
    for (const auto& [v, name] : seen) label_col.categories.push_back(name);
    ds.schema.columns.push_back(label_col);
    ds.schema.label_column = "label";

    ds.rows.reserve(n_images);
    ds.labels.reserve(n_labels);
    for (std::size_t i = 0; i < n_images; ++i) {
        std::vector<double> row(n_pixels);
        const std::size_t base = 16 + i * n_pixels;
        for (std::size_t p = 0; p < n_pixels; ++p) {
            row[p] = static_cast<double>(image_bytes[base + p]) / 255.0;
        }
        ds.rows.push_back(std::move(row));
        ds.labels.push_back(std::to_string(static_cast<int>(label_bytes[8 + i])));
    }
    return ds;
}

}  // namespace biaskit
