#pragma once

#include <string>

#include "json.hpp"

namespace rmt {

// Reads a result record from disk. Missing file -> IoError; unparseable or
// structurally wrong content -> MalformedRecordError.
nlohmann::json load_result_record(const std::string& record_path);

// Re-emits a stored record in the given format ("csv", "json", or "svg") to
// out_path. csv/json re-emission is lossless for their fields; svg renders a
// log-log tail curve with CI whiskers and the fitted slope annotated (only
// tail/smallball records can be plotted; anything else is malformed input
// for svg). Unknown format -> ConfigError. Never overwrites without the
// flag.
void emit_report(const std::string& record_path, const std::string& format,
                 const std::string& out_path, bool overwrite);

// The SVG renderer, exposed for tests. Throws MalformedRecordError when the
// record has no plottable points.
std::string render_tail_svg(const nlohmann::json& record);

}  // namespace rmt
