#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "crt/grids.hpp"
#include "crt/inversion.hpp"

namespace crt {

/// Payload kinds of the CRT container ("CRT1", version 1, little-endian
/// header, float64 data in C order, trailing CRC32 of the payload bytes).
enum class CrtKind : std::uint16_t { cone_grid = 1, processed_grid = 2, volume = 3 };

/// Stage tag stored with grid payloads.
enum class StageTag : std::uint32_t { raw = 0, processed = 1, processed_dy = 2 };

std::uint32_t crc32(const void* data, std::size_t n, std::uint32_t seed = 0);

void write_crt(const ConeDataGrid& g, const std::string& path);
void write_crt(const ProcessedGrid& g, const std::string& path);
void write_crt(const VolumeGrid& v, const std::string& path);

CrtKind peek_crt_kind(const std::string& path);

ConeDataGrid read_cone_grid(const std::string& path);
ProcessedGrid read_processed_grid(const std::string& path);
VolumeGrid read_volume(const std::string& path);

struct Metrics {
    double rel_l2 = 0.0;
    double max_abs = 0.0;
    double psnr = 0.0;
};

/// Error metrics over valid voxels (the larger invalid margin of the two
/// volumes is excluded). Throws SpecMismatch when the specs differ.
Metrics metrics(const VolumeGrid& recon, const VolumeGrid& truth);

} // namespace crt
