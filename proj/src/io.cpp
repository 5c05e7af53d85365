#include "qkr/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qkr {

namespace {

constexpr char kStateMagic[4] = {'Q', 'K', 'R', 'S'};
constexpr std::uint32_t kStateVersion = 1;

static_assert(sizeof(double) == 8, "state files assume 64-bit doubles");

std::string basis_name(Basis b) { return b == Basis::Position ? "position" : "momentum"; }

Basis basis_from_name(const std::string& name) {
    if (name == "position") return Basis::Position;
    if (name == "momentum") return Basis::Momentum;
    throw std::invalid_argument("state file: unknown basis '" + name + "'");
}

}  // namespace

FileFormat format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot != std::string::npos && path.substr(dot) == ".bin") return FileFormat::Binary;
    return FileFormat::Json;
}

nlohmann::json state_to_json(const WaveState& state) {
    nlohmann::json j;
    j["format"] = "qkr-state";
    j["version"] = kStateVersion;
    j["N"] = state.spec.N;
    j["basis"] = basis_name(state.basis);
    std::vector<double> amps;
    amps.reserve(2 * static_cast<size_t>(state.spec.N));
    for (int i = 0; i < state.spec.N; ++i) {
        amps.push_back(state.amplitudes[i].real());
        amps.push_back(state.amplitudes[i].imag());
    }
    j["amplitudes"] = std::move(amps);
    return j;
}

WaveState state_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "qkr-state")
        throw std::invalid_argument("state file: missing or wrong format tag");
    if (j.value("version", 0) != static_cast<int>(kStateVersion))
        throw std::invalid_argument("state file: unsupported version");
    const int N = j.at("N").get<int>();
    const HilbertSpec spec(N);
    const Basis basis = basis_from_name(j.at("basis").get<std::string>());
    const auto& amps = j.at("amplitudes");
    if (!amps.is_array() || static_cast<int>(amps.size()) != 2 * N)
        throw std::invalid_argument("state file: amplitude count does not match N");
    Eigen::VectorXcd v(N);
    for (int i = 0; i < N; ++i)
        v[i] = std::complex<double>(amps[2 * i].get<double>(), amps[2 * i + 1].get<double>());
    return WaveState(spec, basis, std::move(v));
}

void save_state(const WaveState& state, const std::string& path) {
    save_state(state, path, format_from_path(path));
}

void save_state(const WaveState& state, const std::string& path, FileFormat format) {
    if (format == FileFormat::Json) {
        write_json_file(path, state_to_json(state));
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_state: cannot open " + path);
    out.write(kStateMagic, 4);
    const std::uint32_t version = kStateVersion;
    const std::uint32_t n = static_cast<std::uint32_t>(state.spec.N);
    const std::uint8_t basis = state.basis == Basis::Position ? 0 : 1;
    const std::uint8_t pad[3] = {0, 0, 0};
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&basis), 1);
    out.write(reinterpret_cast<const char*>(pad), 3);
    for (int i = 0; i < state.spec.N; ++i) {
        const double re = state.amplitudes[i].real();
        const double im = state.amplitudes[i].imag();
        out.write(reinterpret_cast<const char*>(&re), 8);
        out.write(reinterpret_cast<const char*>(&im), 8);
    }
    if (!out) throw std::runtime_error("save_state: short write to " + path);
}

WaveState load_state(const std::string& path) {
    if (format_from_path(path) == FileFormat::Json) return state_from_json(read_json_file(path));

    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("load_state: cannot open " + path);
    char magic[4];
    std::uint32_t version = 0, n = 0;
    std::uint8_t basis = 0;
    std::uint8_t pad[3];
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&basis), 1);
    in.read(reinterpret_cast<char*>(pad), 3);
    if (!in || std::memcmp(magic, kStateMagic, 4) != 0)
        throw std::invalid_argument("load_state: not a state file: " + path);
    if (version != kStateVersion)
        throw std::invalid_argument("load_state: unsupported version in " + path);
    if (n < 2 || n > (1u << 24)) throw std::invalid_argument("load_state: implausible dimension");
    if (basis > 1) throw std::invalid_argument("load_state: bad basis byte");
    const HilbertSpec spec(static_cast<int>(n));
    Eigen::VectorXcd v(spec.N);
    for (std::uint32_t i = 0; i < n; ++i) {
        double re = 0.0, im = 0.0;
        in.read(reinterpret_cast<char*>(&re), 8);
        in.read(reinterpret_cast<char*>(&im), 8);
        v[i] = std::complex<double>(re, im);
    }
    if (!in) throw std::invalid_argument("load_state: truncated file " + path);
    return WaveState(spec, basis == 0 ? Basis::Position : Basis::Momentum, std::move(v));
}

nlohmann::json kicks_to_json(const ControlKicks& kicks, int N) {
    nlohmann::json j;
    j["format"] = "qkr-kicks";
    j["version"] = 1;
    j["N"] = N;
    auto vec = [](const DisorderVector& d) {
        return std::vector<double>(d.eps.data(), d.eps.data() + d.eps.size());
    };
    j["slots"]["main"] = vec(kicks.main);
    if (kicks.mid1) j["slots"]["mid1"] = vec(*kicks.mid1);
    if (kicks.mid2) j["slots"]["mid2"] = vec(*kicks.mid2);
    return j;
}

ControlKicks kicks_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "qkr-kicks")
        throw std::invalid_argument("kicks file: missing or wrong format tag");
    const int N = j.at("N").get<int>();
    if (N < 2) throw std::invalid_argument("kicks file: bad dimension");
    const auto& slots = j.at("slots");
    auto vec = [&](const nlohmann::json& arr) {
        if (!arr.is_array() || arr.empty() || static_cast<int>(arr.size()) > N)
            throw std::invalid_argument("kicks file: slot length must be in 1..N");
        Eigen::VectorXd e(arr.size());
        for (size_t i = 0; i < arr.size(); ++i) e[static_cast<int>(i)] = arr[i].get<double>();
        return DisorderVector(std::move(e));
    };
    ControlKicks kicks;
    kicks.main = vec(slots.at("main"));
    if (slots.contains("mid1")) kicks.mid1 = vec(slots.at("mid1"));
    if (slots.contains("mid2")) kicks.mid2 = vec(slots.at("mid2"));
    return kicks;
}

void save_kicks(const ControlKicks& kicks, int N, const std::string& path) {
    write_json_file(path, kicks_to_json(kicks, N));
}

ControlKicks load_kicks(const std::string& path) { return kicks_from_json(read_json_file(path)); }

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : path_(path), columns_(columns.size()) {
    if (columns.empty()) throw std::invalid_argument("CsvWriter: header row is mandatory");
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("CsvWriter: cannot open " + path);
    file_ = f;
    std::string header;
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) header += ',';
        header += columns[i];
    }
    header += '\n';
    std::fputs(header.c_str(), f);
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::close() {
    if (file_) {
        std::fclose(static_cast<FILE*>(file_));
        file_ = nullptr;
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
    if (!file_) throw std::runtime_error("CsvWriter: writer already closed: " + path_);
    if (values.size() != columns_)
        throw std::invalid_argument("CsvWriter: row width does not match header in " + path_);
    std::string line;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += format_double(values[i]);
    }
    line += '\n';
    std::fputs(line.c_str(), static_cast<FILE*>(file_));
}

void CsvWriter::row_prefixed(const std::string& label, const std::vector<double>& values) {
    if (!file_) throw std::runtime_error("CsvWriter: writer already closed: " + path_);
    if (values.size() + 1 != columns_)
        throw std::invalid_argument("CsvWriter: row width does not match header in " + path_);
    std::string line = label;
    for (const double v : values) {
        line += ',';
        line += format_double(v);
    }
    line += '\n';
    std::fputs(line.c_str(), static_cast<FILE*>(file_));
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_text_file: cannot open " + path);
    out << content;
    if (!out) throw std::runtime_error("write_text_file: short write to " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("read_text_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_json_file(const std::string& path) {
    try {
        return nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("invalid JSON in " + path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace qkr
