#include "minimod/model.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace minimod {

namespace fs = std::filesystem;
using nlohmann::json;

void validate_model(EarthModel& m) {
    const auto& g = m.grid;
    float vmin = std::numeric_limits<float>::max();
    float vmax = std::numeric_limits<float>::lowest();
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                const float vp = m.vp.at(i, j, k);
                if (!std::isfinite(vp) || vp <= 0.0f)
                    throw ValidationError("vp must be finite and > 0 everywhere");
                vmin = std::min(vmin, vp);
                vmax = std::max(vmax, vp);
                if (m.vs) {
                    const float vs = m.vs->at(i, j, k);
                    if (!std::isfinite(vs) || vs < 0.0f || vs >= vp)
                        throw ValidationError("vs must satisfy 0 <= vs < vp everywhere");
                }
                if (m.rho) {
                    const float rho = m.rho->at(i, j, k);
                    if (!std::isfinite(rho) || rho <= 0.0f)
                        throw ValidationError("rho must be finite and > 0 everywhere");
                }
            }
    m.vmin = vmin;
    m.vmax = vmax;
    fill_ghosts_replicate(m.vp);
    if (m.vs) fill_ghosts_replicate(*m.vs);
    if (m.rho) fill_ghosts_replicate(*m.rho);
}

EarthModel constant_model(const Grid3D& grid, float vp, std::optional<float> vs,
                          std::optional<float> rho) {
    EarthModel m;
    m.grid = grid;
    m.vp = Field(grid, "vp");
    m.vp.fill(vp);
    if (vs) {
        m.vs = Field(grid, "vs");
        m.vs->fill(*vs);
    }
    if (rho) {
        m.rho = Field(grid, "rho");
        m.rho->fill(*rho);
    }
    validate_model(m);
    return m;
}

EarthModel default_layered_model(const Grid3D& grid) {
    EarthModel m;
    m.grid = grid;
    m.vp = Field(grid, "vp");
    m.rho = Field(grid, "rho");
    const int half = grid.n[2] / 2;
    for (int i = 0; i < grid.n[0]; ++i)
        for (int j = 0; j < grid.n[1]; ++j)
            for (int k = 0; k < grid.n[2]; ++k) {
                m.vp.at(i, j, k) = k < half ? 1500.0f : 4500.0f;
                m.rho->at(i, j, k) = 1000.0f;
            }
    validate_model(m);
    return m;
}

namespace {

void read_volume(const fs::path& path, Field& f) {
    const Grid3D& g = f.grid;
    const std::size_t count =
        static_cast<std::size_t>(g.n[0]) * g.n[1] * g.n[2];
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw ConfigError("cannot open volume file: " + path.string());
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes != count * sizeof(float))
        throw ConfigError("size mismatch for " + path.string() + ": manifest implies " +
                          std::to_string(count * sizeof(float)) + " bytes, file has " +
                          std::to_string(bytes));
    in.seekg(0);
    std::vector<float> buf(count);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw ConfigError("short read from " + path.string());
    std::size_t idx = 0;
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) f.at(i, j, k) = buf[idx++];
}

void write_volume(const fs::path& path, const Field& f) {
    const Grid3D& g = f.grid;
    std::vector<float> buf;
    buf.reserve(static_cast<std::size_t>(g.n[0]) * g.n[1] * g.n[2]);
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) buf.push_back(f.at(i, j, k));
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write volume file: " + tmp.string());
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (!out) throw ConfigError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

} // namespace

EarthModel load_model(const std::string& manifest_path) {
    if (manifest_path.empty()) throw ConfigError("empty model manifest path");
    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("cannot open model manifest: " + manifest_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed model manifest " + manifest_path + ": " + e.what());
    }
    if (j.value("dtype", "f32le") != "f32le")
        throw ConfigError("unsupported dtype in manifest (only f32le)");
    if (j.value("order", "z-fastest") != "z-fastest")
        throw ConfigError("unsupported order in manifest (only z-fastest)");
    std::array<int, 3> n = j.at("n");
    std::array<double, 3> d = j.at("d");
    const Grid3D grid = make_grid(n, d);
    const fs::path dir = fs::path(manifest_path).parent_path();
    const auto& comps = j.at("components");
    EarthModel m;
    m.grid = grid;
    m.vp = Field(grid, "vp");
    read_volume(dir / comps.at("vp").get<std::string>(), m.vp);
    if (comps.contains("vs")) {
        m.vs = Field(grid, "vs");
        read_volume(dir / comps.at("vs").get<std::string>(), *m.vs);
    }
    if (comps.contains("rho")) {
        m.rho = Field(grid, "rho");
        read_volume(dir / comps.at("rho").get<std::string>(), *m.rho);
    }
    validate_model(m);
    return m;
}

void save_model(const EarthModel& model, const std::string& manifest_path) {
    if (manifest_path.empty()) throw ConfigError("empty model manifest path");
    const fs::path dir = fs::path(manifest_path).parent_path();
    json comps;
    comps["vp"] = "vp.f32";
    write_volume(dir / "vp.f32", model.vp);
    if (model.vs) {
        comps["vs"] = "vs.f32";
        write_volume(dir / "vs.f32", *model.vs);
    }
    if (model.rho) {
        comps["rho"] = "rho.f32";
        write_volume(dir / "rho.f32", *model.rho);
    }
    json j;
    j["n"] = model.grid.n;
    j["d"] = model.grid.d;
    j["components"] = comps;
    j["dtype"] = "f32le";
    j["order"] = "z-fastest";
    const fs::path tmp = manifest_path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw ConfigError("cannot write manifest: " + manifest_path);
        out << j.dump(2) << "\n";
    }
    fs::rename(tmp, manifest_path);
}

std::pair<Field, Field> lame_parameters(const EarthModel& m) {
    if (!m.vs || !m.rho)
        throw ValidationError("lame_parameters requires vs and rho volumes");
    Field lambda(m.grid, "lambda");
    Field mu(m.grid, "mu");
    const int r = m.grid.radius;
    for (int i = -r; i < m.grid.n[0] + r; ++i)
        for (int j = -r; j < m.grid.n[1] + r; ++j)
            for (int k = -r; k < m.grid.n[2] + r; ++k) {
                const float vp = m.vp.at(i, j, k);
                const float vs = m.vs->at(i, j, k);
                const float rho = m.rho->at(i, j, k);
                mu.at(i, j, k) = rho * vs * vs;
                lambda.at(i, j, k) = rho * (vp * vp - 2.0f * vs * vs);
            }
    return {std::move(lambda), std::move(mu)};
}

} // namespace minimod
