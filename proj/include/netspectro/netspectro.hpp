#ifndef NETSPECTRO_NETSPECTRO_HPP
#define NETSPECTRO_NETSPECTRO_HPP

// Umbrella header: spectral and wavelet analysis of packet-arrival
// periodicities, with ingest, classification, and synthesis support.
//
// All operations are pure functions over value types and are safe to call
// concurrently from multiple threads.

#include "netspectro/classify.hpp"
#include "netspectro/errors.hpp"
#include "netspectro/ingest.hpp"
#include "netspectro/spectral.hpp"
#include "netspectro/synth.hpp"
#include "netspectro/trace.hpp"
#include "netspectro/wavelet.hpp"

#endif
