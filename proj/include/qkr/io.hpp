#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "qkr/hilbert.hpp"
#include "qkr/rotor.hpp"

namespace qkr {

enum class FileFormat { Json, Binary };

// Picks Binary for a ".bin" suffix, Json otherwise.
FileFormat format_from_path(const std::string& path);

// State files. JSON carries interleaved re/im amplitude pairs; the binary
// layout is a fixed little-endian header plus 2N float64 amplitudes. Loaders
// validate the header and dimensions and throw on mismatch.
void save_state(const WaveState& state, const std::string& path);
void save_state(const WaveState& state, const std::string& path, FileFormat format);
WaveState load_state(const std::string& path);

nlohmann::json state_to_json(const WaveState& state);
WaveState state_from_json(const nlohmann::json& j);

// Kick-amplitude files (JSON only; these are small).
nlohmann::json kicks_to_json(const ControlKicks& kicks, int N);
ControlKicks kicks_from_json(const nlohmann::json& j);
void save_kicks(const ControlKicks& kicks, int N, const std::string& path);
ControlKicks load_kicks(const std::string& path);

// Line-buffered CSV writer with a mandatory header row. Numbers are printed
// with "%.17g" so reruns produce byte-identical files.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<double>& values);
    void row_prefixed(const std::string& label, const std::vector<double>& values);
    void close();

private:
    void* file_ = nullptr;  // FILE*, kept out of the header
    std::string path_;
    size_t columns_ = 0;
};

std::string format_double(double v);

// Whole-file helpers.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace qkr
