#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tdict/tensor3.hpp"

namespace tdict {

// Binary tensor formats. All integers and scalars are little-endian.
//
//   T3D1   "T3D1"  rows cols tubes (u64)   rows*cols*tubes f64, element
//          (i, j, k) at offset i + rows * (j + cols * k).
//   TDCT1  "TDCT1" p s q (u64)              p*s*q f64 in T3D1 order.
//   TCOF1  "TCOF1" s M q (u64) count (u64)  count records of
//          i, j, k (u32) followed by the value (f64).
//
// Readers reject short or trailing payloads with a FormatError that names
// the byte offset where decoding stopped.

/// Serialized byte image; the stream and file functions below wrap these.
std::vector<std::uint8_t> encode_t3d1(const Tensor3& t);
Tensor3 decode_t3d1(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_tdct1(const Tensor3& dictionary);
Tensor3 decode_tdct1(std::span<const std::uint8_t> bytes);

/// Stores entries with magnitude above threshold only.
std::vector<std::uint8_t> encode_tcof1(const Tensor3& coefficients, double threshold = 1e-12);
Tensor3 decode_tcof1(std::span<const std::uint8_t> bytes);

/// Which of the three formats a buffer starts with, or empty if none.
std::string sniff_format(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

void write_t3d1(const std::filesystem::path& path, const Tensor3& t);
Tensor3 read_t3d1(const std::filesystem::path& path);
void write_dictionary(const std::filesystem::path& path, const Tensor3& dictionary);
Tensor3 read_dictionary(const std::filesystem::path& path);
void write_coefficients(const std::filesystem::path& path, const Tensor3& coefficients, double threshold = 1e-12);
Tensor3 read_coefficients(const std::filesystem::path& path);

/// Reads any of T3D1 / TCOF1 as a coefficient tensor.
Tensor3 read_tensor_any(const std::filesystem::path& path);

}  // namespace tdict
