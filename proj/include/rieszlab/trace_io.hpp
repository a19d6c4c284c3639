#pragma once

// Trace CSV layout:
//
//   # rieszlab-trace schema_version=1
//   # kind=union            (or single)
//   # set_hash=<16 hex>
//   # a1_hash=<16 hex>      (union only)
//   # a2_hash=<16 hex>      (union only)
//   # s=3
//   # d=1
//   N,E_best,G,N1,N2,frac1,min_dist,status
//   2,0.25,...
//
// Numbers are written in shortest round-trip form, so equal traces give
// byte-identical files.

#include <string>

#include "rieszlab/optimizer.hpp"

namespace rieszlab {

inline constexpr int kTraceSchemaVersion = 1;
inline constexpr int kSummarySchemaVersion = 1;

std::string format_trace_csv(const AsymptoticTrace& trace);
AsymptoticTrace parse_trace_csv(const std::string& text);

void write_trace_csv(const std::string& path, const AsymptoticTrace& trace);
AsymptoticTrace read_trace_csv(const std::string& path);

}  // namespace rieszlab
