#pragma once

#include <string>

#include "core/raster.hpp"
#include "core/superpixel.hpp"

namespace sess {

/// Decodes a PNG or PPM/PGM file into 8-bit RGB. Grayscale inputs are
/// replicated across channels. Throws IoError for a missing/unreadable file,
/// FormatError for anything that does not decode.
RgbImage load_image(const std::string& path);

/// Decodes an 8-bit grayscale raster into [0,1]; RGB inputs must carry equal
/// channels. value v maps to v/255.
SaliencyMap load_saliency(const std::string& path);

/// Writes an 8-bit grayscale PNG or PGM; pixel = round(v * 255).
void save_map(const SaliencyMap& map, const std::string& path);

/// Writes an 8-bit RGB PNG or PPM.
void save_image(const RgbImage& img, const std::string& path);

/// Debug export: superpixel label raster as 16-bit grayscale PNG.
void save_labels(const Segmentation& seg, const std::string& path);

/// Debug export: input image with superpixel boundaries marked.
void save_boundary_overlay(const RgbImage& img, const Segmentation& seg, const std::string& path);

}  // namespace sess
