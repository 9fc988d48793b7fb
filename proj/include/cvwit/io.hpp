#pragma once

#include <json.hpp>
#include <string>

#include "cvwit/fock.hpp"
#include "cvwit/observables.hpp"
#include "cvwit/witness.hpp"

namespace cvwit {

// Density-matrix container format ("CVDM"):
//   bytes 0..3   magic "CVDM"
//   bytes 4..7   uint32 (little endian) JSON header length L
//   bytes 8..8+L JSON header {"N":..,"d":..,"layout":"row-major",
//                             "convention":"sqrt2-quadratures","pure":bool}
//   then, if pure: d^N complex doubles (re, im interleaved, little endian)
//   else:          d^N * d^N complex doubles, row-major, interleaved
void save_density(const DensityMatrix& dm, const std::string& path);
DensityMatrix load_density(const std::string& path);

nlohmann::json certificate_to_json(const StructureCertificate& cert,
                                   const ObservableSet& set);

}  // namespace cvwit
