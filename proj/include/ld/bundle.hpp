#pragma once

#include <string>

#include "ld/synth.hpp"

namespace ld {

/// Bundle directory layout: manifest.json, edges.txt, attrs.f32, labels.f32,
/// split_{train,val,test}.u32, plus targets.f32 when continuous targets are
/// present. Arrays are little-endian 32-bit floats / 32-bit unsigned ints.
void save_bundle(const GeneratedDataset& ds, const std::string& dir);

/// Loads a bundle; generator ground truth (psi*, F*) is not part of the
/// format and comes back empty. Throws DataError on version or shape
/// mismatches and on missing files.
GeneratedDataset load_bundle(const std::string& dir);

}  // namespace ld
