#include "svsdf/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace svsdf::io
{

    using nlohmann::json;

    namespace
    {

        json readJsonFile(const std::string &path)
        {
            std::ifstream in(path);
            if (!in)
            {
                throw IoError("cannot open " + path);
            }
            json j;
            try
            {
                in >> j;
            }
            catch (const json::parse_error &e)
            {
                throw IoError("parse error in " + path + ": " + e.what());
            }
            return j;
        }

        void writeTextFile(const std::string &path, const std::string &content)
        {
            std::ofstream out(path);
            if (!out)
            {
                throw IoError("cannot write " + path);
            }
            out << content;
        }

        Vec2 vec2FromJson(const json &j)
        {
            if (!j.is_array() || j.size() != 2)
            {
                throw IoError("expected a 2-element array");
            }
            return Vec2(j[0].get<double>(), j[1].get<double>());
        }

        json vec2ToJson(const Vec2 &v) { return json::array({v.x(), v.y()}); }

        Pose2 poseFromJson(const json &j)
        {
            Pose2 p;
            p.translation = vec2FromJson(j.at("position"));
            p.yaw = j.value("yaw", 0.0);
            return p;
        }

        json poseToJson(const Pose2 &p)
        {
            return json{{"position", vec2ToJson(p.translation)}, {"yaw", p.yaw}};
        }

        const char kBase64Chars[] =
            "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

        std::string base64Encode(const std::vector<uint8_t> &bytes)
        {
            std::string out;
            out.reserve((bytes.size() + 2) / 3 * 4);
            for (size_t i = 0; i < bytes.size(); i += 3)
            {
                uint32_t chunk = bytes[i] << 16;
                if (i + 1 < bytes.size())
                {
                    chunk |= bytes[i + 1] << 8;
                }
                if (i + 2 < bytes.size())
                {
                    chunk |= bytes[i + 2];
                }
                out.push_back(kBase64Chars[(chunk >> 18) & 63]);
                out.push_back(kBase64Chars[(chunk >> 12) & 63]);
                out.push_back(i + 1 < bytes.size() ? kBase64Chars[(chunk >> 6) & 63] : '=');
                out.push_back(i + 2 < bytes.size() ? kBase64Chars[chunk & 63] : '=');
            }
            return out;
        }

        std::vector<uint8_t> base64Decode(const std::string &text)
        {
            std::vector<int> lut(256, -1);
            for (int i = 0; i < 64; ++i)
            {
                lut[static_cast<unsigned char>(kBase64Chars[i])] = i;
            }
            std::vector<uint8_t> out;
            uint32_t chunk = 0;
            int bits = 0;
            for (char c : text)
            {
                if (c == '=' || c == '\n' || c == '\r')
                {
                    continue;
                }
                const int v = lut[static_cast<unsigned char>(c)];
                if (v < 0)
                {
                    throw IoError("invalid base64 character");
                }
                chunk = (chunk << 6) | static_cast<uint32_t>(v);
                bits += 6;
                if (bits >= 8)
                {
                    bits -= 8;
                    out.push_back(static_cast<uint8_t>((chunk >> bits) & 0xFF));
                }
            }
            return out;
        }

        std::string directoryOf(const std::string &path)
        {
            const size_t slash = path.find_last_of('/');
            return slash == std::string::npos ? std::string() : path.substr(0, slash + 1);
        }

        bool endsWith(const std::string &s, const std::string &suffix)
        {
            return s.size() >= suffix.size() &&
                   s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
        }

    } // namespace

    Shape shapeFromJson(const json &j)
    {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "disk")
        {
            return Shape::disk(j.at("radius").get<double>());
        }
        if (kind == "box")
        {
            return Shape::box(vec2FromJson(j.at("half_extents")));
        }
        if (kind == "convex_polygon" || kind == "polygon")
        {
            std::vector<Vec2> verts;
            for (const json &v : j.at("vertices"))
            {
                verts.push_back(vec2FromJson(v));
            }
            return kind == "convex_polygon" ? Shape::convexPolygon(std::move(verts))
                                            : Shape::polygon(std::move(verts));
        }
        if (kind == "scaling_disk")
        {
            return Shape::scalingDisk(j.at("radius_start").get<double>(),
                                      j.at("radius_end").get<double>());
        }
        if (kind == "union")
        {
            std::vector<Shape> parts;
            std::vector<Pose2> poses;
            for (const json &part : j.at("parts"))
            {
                parts.push_back(shapeFromJson(part.at("shape")));
                Pose2 pose;
                if (part.contains("offset"))
                {
                    pose.translation = vec2FromJson(part["offset"]);
                }
                pose.yaw = part.value("yaw", 0.0);
                poses.push_back(pose);
            }
            return Shape::unionOf(std::move(parts), std::move(poses));
        }
        throw IoError("unknown shape kind: " + kind);
    }

    json shapeToJson(const Shape &shape)
    {
        json j;
        switch (shape.kind())
        {
        case Shape::Kind::Disk:
            j["kind"] = "disk";
            j["radius"] = shape.diskRadius();
            break;
        case Shape::Kind::Box:
            j["kind"] = "box";
            j["half_extents"] = vec2ToJson(shape.halfExtents());
            break;
        case Shape::Kind::ConvexPolygon:
        case Shape::Kind::Polygon:
        {
            j["kind"] = shape.kind() == Shape::Kind::ConvexPolygon ? "convex_polygon" : "polygon";
            json verts = json::array();
            for (const Vec2 &v : shape.vertices())
            {
                verts.push_back(vec2ToJson(v));
            }
            j["vertices"] = verts;
            break;
        }
        case Shape::Kind::ScalingDisk:
            j["kind"] = "scaling_disk";
            j["radius_start"] = shape.radiusStart();
            j["radius_end"] = shape.radiusEnd();
            break;
        case Shape::Kind::Union:
        {
            j["kind"] = "union";
            json parts = json::array();
            for (size_t i = 0; i < shape.parts().size(); ++i)
            {
                parts.push_back(json{{"shape", shapeToJson(shape.parts()[i])},
                                     {"offset", vec2ToJson(shape.partPoses()[i].translation)},
                                     {"yaw", shape.partPoses()[i].yaw}});
            }
            j["parts"] = parts;
            break;
        }
        }
        return j;
    }

    Shape loadShape(const std::string &path) { return shapeFromJson(readJsonFile(path)); }

    void saveShape(const Shape &shape, const std::string &path)
    {
        writeTextFile(path, shapeToJson(shape).dump(2) + "\n");
    }

    std::vector<uint8_t> readPgm(const std::string &path, int &nx, int &ny)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
        {
            throw IoError("cannot open " + path);
        }
        std::string magic;
        in >> magic;
        if (magic != "P5" && magic != "P2")
        {
            throw IoError(path + ": not a PGM file");
        }
        const auto nextToken = [&in, &path]() -> long
        {
            std::string tok;
            while (in >> tok)
            {
                if (tok[0] == '#')
                {
                    std::string rest;
                    std::getline(in, rest);
                    continue;
                }
                return std::stol(tok);
            }
            throw IoError(path + ": truncated PGM header");
        };
        nx = static_cast<int>(nextToken());
        ny = static_cast<int>(nextToken());
        const long maxval = nextToken();
        if (nx <= 0 || ny <= 0 || maxval <= 0 || maxval > 255)
        {
            throw IoError(path + ": unsupported PGM geometry");
        }
        std::vector<uint8_t> gray(static_cast<size_t>(nx) * ny);
        if (magic == "P5")
        {
            in.get(); // single whitespace after maxval
            in.read(reinterpret_cast<char *>(gray.data()), static_cast<std::streamsize>(gray.size()));
            if (in.gcount() != static_cast<std::streamsize>(gray.size()))
            {
                throw IoError(path + ": truncated PGM payload");
            }
        }
        else
        {
            for (size_t i = 0; i < gray.size(); ++i)
            {
                long v;
                if (!(in >> v))
                {
                    throw IoError(path + ": truncated PGM payload");
                }
                gray[i] = static_cast<uint8_t>(v);
            }
        }
        return gray;
    }

    void writePgm(const std::string &path, const std::vector<uint8_t> &gray, int nx, int ny)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
        {
            throw IoError("cannot write " + path);
        }
        out << "P5\n"
            << nx << " " << ny << "\n255\n";
        out.write(reinterpret_cast<const char *>(gray.data()),
                  static_cast<std::streamsize>(gray.size()));
    }

    Scene sceneFromJson(const json &j)
    {
        GridSpec grid;
        grid.cell_size = j.at("cell_size").get<double>();
        grid.origin = vec2FromJson(j.at("origin"));
        grid.nx = j.at("nx").get<int>();
        grid.ny = j.at("ny").get<int>();
        if (grid.nx <= 0 || grid.ny <= 0 || !(grid.cell_size > 0.0))
        {
            throw IoError("invalid scene grid");
        }
        std::vector<uint8_t> occupancy(grid.cellCount(), 0);
        if (j.contains("grid_base64"))
        {
            const std::vector<uint8_t> bytes = base64Decode(j["grid_base64"].get<std::string>());
            if (bytes.size() != (static_cast<size_t>(grid.cellCount()) + 7) / 8)
            {
                throw IoError("grid_base64 size does not match nx*ny");
            }
            for (int i = 0; i < grid.cellCount(); ++i)
            {
                occupancy[i] = (bytes[i / 8] >> (i % 8)) & 1;
            }
        }
        if (j.contains("rects"))
        {
            for (const json &r : j["rects"])
            {
                const Vec2 lo = vec2FromJson(r.at("min"));
                const Vec2 hi = vec2FromJson(r.at("max"));
                for (int iy = 0; iy < grid.ny; ++iy)
                {
                    for (int ix = 0; ix < grid.nx; ++ix)
                    {
                        const Vec2 c = grid.cellCenter(ix, iy);
                        if (c.x() >= lo.x() && c.x() <= hi.x() &&
                            c.y() >= lo.y() && c.y() <= hi.y())
                        {
                            occupancy[grid.index(ix, iy)] = 1;
                        }
                    }
                }
            }
        }
        if (j.contains("discs"))
        {
            for (const json &d : j["discs"])
            {
                const Vec2 c0 = vec2FromJson(d.at("center"));
                const double r = d.at("radius").get<double>();
                for (int iy = 0; iy < grid.ny; ++iy)
                {
                    for (int ix = 0; ix < grid.nx; ++ix)
                    {
                        if ((grid.cellCenter(ix, iy) - c0).norm() <= r)
                        {
                            occupancy[grid.index(ix, iy)] = 1;
                        }
                    }
                }
            }
        }
        Pose2 start, goal;
        if (j.contains("start"))
        {
            start = poseFromJson(j["start"]);
        }
        if (j.contains("goal"))
        {
            goal = poseFromJson(j["goal"]);
        }
        return Scene::fromOccupancy(grid, std::move(occupancy), start, goal);
    }

    json sceneToJson(const Scene &scene)
    {
        std::vector<uint8_t> bytes((static_cast<size_t>(scene.grid.cellCount()) + 7) / 8, 0);
        for (int i = 0; i < scene.grid.cellCount(); ++i)
        {
            if (scene.occupancy[i])
            {
                bytes[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
            }
        }
        return json{{"cell_size", scene.grid.cell_size},
                    {"origin", vec2ToJson(scene.grid.origin)},
                    {"nx", scene.grid.nx},
                    {"ny", scene.grid.ny},
                    {"grid_base64", base64Encode(bytes)},
                    {"start", poseToJson(scene.start)},
                    {"goal", poseToJson(scene.goal)}};
    }

    Scene loadScene(const std::string &path)
    {
        if (endsWith(path, ".pgm"))
        {
            int nx, ny;
            const std::vector<uint8_t> gray = readPgm(path, nx, ny);
            GridSpec grid;
            grid.nx = nx;
            grid.ny = ny;
            grid.cell_size = 0.1;
            grid.origin = Vec2(0.0, 0.0);
            std::vector<uint8_t> occupancy(grid.cellCount(), 0);
            // First PGM row is the top of the map.
            for (int iy = 0; iy < ny; ++iy)
            {
                for (int ix = 0; ix < nx; ++ix)
                {
                    const uint8_t g = gray[static_cast<size_t>(ny - 1 - iy) * nx + ix];
                    occupancy[grid.index(ix, iy)] = g < 128 ? 1 : 0;
                }
            }
            return Scene::fromOccupancy(grid, std::move(occupancy), Pose2(), Pose2());
        }
        return sceneFromJson(readJsonFile(path));
    }

    void saveScene(const Scene &scene, const std::string &path)
    {
        if (endsWith(path, ".pgm"))
        {
            std::vector<uint8_t> gray(scene.occupancy.size());
            for (int iy = 0; iy < scene.grid.ny; ++iy)
            {
                for (int ix = 0; ix < scene.grid.nx; ++ix)
                {
                    gray[static_cast<size_t>(scene.grid.ny - 1 - iy) * scene.grid.nx + ix] =
                        scene.occupancy[scene.grid.index(ix, iy)] ? 0 : 255;
                }
            }
            writePgm(path, gray, scene.grid.nx, scene.grid.ny);
            return;
        }
        writeTextFile(path, sceneToJson(scene).dump(2) + "\n");
    }

    void writeField(const std::string &base_path, const GridSpec &grid,
                    const std::vector<double> &values)
    {
        if (static_cast<int>(values.size()) != grid.cellCount())
        {
            throw IoError("field size does not match grid");
        }
        {
            std::ofstream raw(base_path + ".f32", std::ios::binary);
            if (!raw)
            {
                throw IoError("cannot write " + base_path + ".f32");
            }
            for (double v : values)
            {
                const float f = static_cast<float>(v);
                raw.write(reinterpret_cast<const char *>(&f), sizeof(float));
            }
        }
        const json header{{"origin", vec2ToJson(grid.origin)},
                          {"cell_size", grid.cell_size},
                          {"nx", grid.nx},
                          {"ny", grid.ny}};
        writeTextFile(base_path + ".json", header.dump(2) + "\n");

        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (double v : values)
        {
            if (std::isfinite(v))
            {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        const double span = (hi > lo) ? hi - lo : 1.0;
        std::vector<uint8_t> gray(values.size());
        for (int iy = 0; iy < grid.ny; ++iy)
        {
            for (int ix = 0; ix < grid.nx; ++ix)
            {
                const double v = values[grid.index(ix, iy)];
                const double n = std::isfinite(v) ? (v - lo) / span : 1.0;
                gray[static_cast<size_t>(grid.ny - 1 - iy) * grid.nx + ix] =
                    static_cast<uint8_t>(std::lround(255.0 * std::clamp(n, 0.0, 1.0)));
            }
        }
        writePgm(base_path + ".pgm", gray, grid.nx, grid.ny);
    }

    FieldFile readField(const std::string &base_path)
    {
        const json header = readJsonFile(base_path + ".json");
        FieldFile f;
        f.grid.origin = vec2FromJson(header.at("origin"));
        f.grid.cell_size = header.at("cell_size").get<double>();
        f.grid.nx = header.at("nx").get<int>();
        f.grid.ny = header.at("ny").get<int>();
        std::ifstream raw(base_path + ".f32", std::ios::binary);
        if (!raw)
        {
            throw IoError("cannot open " + base_path + ".f32");
        }
        f.values.resize(f.grid.cellCount());
        raw.read(reinterpret_cast<char *>(f.values.data()),
                 static_cast<std::streamsize>(f.values.size() * sizeof(float)));
        if (raw.gcount() != static_cast<std::streamsize>(f.values.size() * sizeof(float)))
        {
            throw IoError(base_path + ".f32: truncated payload");
        }
        return f;
    }

    void writeTrajectoryCsv(const std::string &path, const Trajectory &traj, double sample_step)
    {
        if (!(sample_step > 0.0))
        {
            throw IoError("sample step must be positive");
        }
        std::ostringstream out;
        out.precision(17);
        out << "t,x,y,yaw,vx,vy,yaw_rate\n";
        const double total = traj.totalDuration();
        for (double t = 0.0;; t += sample_step)
        {
            const double tc = std::min(t, total);
            const Eigen::VectorXd p = traj.evalClamped(tc, 0);
            const Eigen::VectorXd v = traj.evalClamped(tc, 1);
            out << tc << ',' << p(0) << ',' << p(1) << ',' << p(2) << ','
                << v(0) << ',' << v(1) << ',' << v(2) << '\n';
            if (t >= total)
            {
                break;
            }
        }
        writeTextFile(path, out.str());
    }

    json trajectoryToJson(const Trajectory &traj)
    {
        json coeffs = json::array();
        for (int i = 0; i < traj.coeffs().rows(); ++i)
        {
            json row = json::array();
            for (int d = 0; d < traj.coeffs().cols(); ++d)
            {
                row.push_back(traj.coeffs()(i, d));
            }
            coeffs.push_back(row);
        }
        json durations = json::array();
        for (int i = 0; i < traj.segments(); ++i)
        {
            durations.push_back(traj.durations()(i));
        }
        const auto vecToJson = [](const Eigen::VectorXd &v)
        {
            json a = json::array();
            for (int i = 0; i < v.size(); ++i)
            {
                a.push_back(v(i));
            }
            return a;
        };
        return json{{"dims", traj.dims()},
                    {"durations", durations},
                    {"coeffs", coeffs},
                    {"head", json{{"position", vecToJson(traj.head().position)},
                                  {"velocity", vecToJson(traj.head().velocity)},
                                  {"acceleration", vecToJson(traj.head().acceleration)}}},
                    {"tail", json{{"position", vecToJson(traj.tail().position)},
                                  {"velocity", vecToJson(traj.tail().velocity)},
                                  {"acceleration", vecToJson(traj.tail().acceleration)}}}};
    }

    Trajectory trajectoryFromJson(const json &j)
    {
        const auto vecFromJson = [](const json &a)
        {
            Eigen::VectorXd v(a.size());
            for (size_t i = 0; i < a.size(); ++i)
            {
                v(i) = a[i].get<double>();
            }
            return v;
        };
        const int dims = j.at("dims").get<int>();
        const json &jd = j.at("durations");
        const int N = static_cast<int>(jd.size());
        Eigen::VectorXd durations = vecFromJson(jd);
        const json &jc = j.at("coeffs");
        if (static_cast<int>(jc.size()) != 6 * N)
        {
            throw IoError("trajectory coeffs must have 6 rows per segment");
        }
        Eigen::MatrixXd coeffs(6 * N, dims);
        for (int r = 0; r < 6 * N; ++r)
        {
            for (int d = 0; d < dims; ++d)
            {
                coeffs(r, d) = jc[r][d].get<double>();
            }
        }
        // Rebuild through the constructor path so invariants hold: recover
        // waypoints from the stored coefficients, then re-solve.
        BoundaryState head(vecFromJson(j.at("head").at("position")),
                           vecFromJson(j.at("head").at("velocity")),
                           vecFromJson(j.at("head").at("acceleration")));
        BoundaryState tail(vecFromJson(j.at("tail").at("position")),
                           vecFromJson(j.at("tail").at("velocity")),
                           vecFromJson(j.at("tail").at("acceleration")));
        Eigen::MatrixXd waypoints(dims, std::max(N - 1, 0));
        for (int i = 0; i + 1 < N; ++i)
        {
            const double t = durations(i);
            Eigen::Matrix<double, 6, 1> b;
            b << 1.0, t, t * t, t * t * t, t * t * t * t, t * t * t * t * t;
            waypoints.col(i) = coeffs.block(6 * i, 0, 6, dims).transpose() * b;
        }
        return mincoConstruct(head, tail, waypoints, durations);
    }

    void saveTrajectory(const Trajectory &traj, const std::string &path)
    {
        writeTextFile(path, trajectoryToJson(traj).dump() + "\n");
    }

    Trajectory loadTrajectory(const std::string &path)
    {
        return trajectoryFromJson(readJsonFile(path));
    }

    Motion motionFromJson(const json &j, const std::string &base_dir)
    {
        const std::string type = j.at("type").get<std::string>();
        const double t0 = j.value("t_start", 0.0);
        const double t1 = j.value("t_end", 1.0);
        if (type == "constant")
        {
            return Motion::constant(poseFromJson(j.at("pose")), t0, t1);
        }
        if (type == "linear")
        {
            return Motion::linear(poseFromJson(j.at("from")), poseFromJson(j.at("to")), t0, t1);
        }
        if (type == "trajectory")
        {
            const std::string file = j.at("file").get<std::string>();
            const std::string full = (file.empty() || file.front() == '/') ? file : base_dir + file;
            return Motion::trajectory(std::make_shared<Trajectory>(loadTrajectory(full)));
        }
        throw IoError("unknown motion type: " + type);
    }

    Motion loadMotion(const std::string &path)
    {
        return motionFromJson(readJsonFile(path), directoryOf(path));
    }

    json reportToJson(const PlanReport &report)
    {
        const auto finiteOrNull = [](double v) -> json
        {
            if (std::isfinite(v))
            {
                return v;
            }
            return nullptr;
        };
        const auto costsToJson = [&](const StageCosts &c)
        {
            return json{{"total", finiteOrNull(c.total)},
                        {"smoothness", finiteOrNull(c.smoothness)},
                        {"time", finiteOrNull(c.time)},
                        {"position_residual", finiteOrNull(c.position_residual)},
                        {"yaw_residual", finiteOrNull(c.yaw_residual)},
                        {"obstacle", finiteOrNull(c.obstacle)},
                        {"dynamic", finiteOrNull(c.dynamic)}};
        };
        return json{{"success", report.success},
                    {"cca_pass", report.cca_pass},
                    {"min_clearance", finiteOrNull(report.min_clearance)},
                    {"astar_expansions", report.astar_expansions},
                    {"iterations", json{{"midend", report.midend_iterations},
                                        {"backend", report.backend_iterations}}},
                    {"culled_obstacles", report.culled_obstacles},
                    {"final_costs", json{{"obstacle", finiteOrNull(report.final_obstacle_cost)},
                                         {"min_obstacle_svsdf", finiteOrNull(report.min_obstacle_svsdf)},
                                         {"midend", costsToJson(report.midend_costs)},
                                         {"backend", costsToJson(report.backend_costs)}}},
                    {"wall_time_ms", report.wall_time_ms},
                    {"warning", report.warning},
                    {"failure", report.failure}};
    }

    void writeSvg(const std::string &path, const Scene &scene,
                  const AStarResult *astar, const Trajectory *initial,
                  const Trajectory *final_traj, const std::vector<uint8_t> *sv_occupancy)
    {
        const GridSpec &g = scene.grid;
        const double w = g.nx * g.cell_size;
        const double h = g.ny * g.cell_size;
        const double scale = 64.0;
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w * scale
            << "\" height=\"" << h * scale << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
        // y flips so larger world y is up
        const auto X = [&](double wx)
        { return wx - g.origin.x(); };
        const auto Y = [&](double wy)
        { return h - (wy - g.origin.y()); };

        out << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
            << "\" fill=\"#ffffff\"/>\n";
        out << "<g fill=\"#30343a\">\n";
        for (int iy = 0; iy < g.ny; ++iy)
        {
            for (int ix = 0; ix < g.nx; ++ix)
            {
                if (scene.occupancy[g.index(ix, iy)])
                {
                    const Vec2 c = g.cellCenter(ix, iy);
                    out << "<rect x=\"" << X(c.x()) - 0.5 * g.cell_size << "\" y=\""
                        << Y(c.y()) - 0.5 * g.cell_size << "\" width=\"" << g.cell_size
                        << "\" height=\"" << g.cell_size << "\"/>\n";
                }
            }
        }
        out << "</g>\n";

        if (sv_occupancy != nullptr)
        {
            // Boundary edges of the swept-volume raster.
            out << "<g stroke=\"#74b3e3\" stroke-width=\"" << 0.35 * g.cell_size
                << "\" opacity=\"0.9\">\n";
            const auto occ = [&](int ix, int iy)
            {
                return g.contains(ix, iy) && (*sv_occupancy)[g.index(ix, iy)] != 0;
            };
            for (int iy = 0; iy < g.ny; ++iy)
            {
                for (int ix = 0; ix < g.nx; ++ix)
                {
                    if (!occ(ix, iy))
                    {
                        continue;
                    }
                    const Vec2 c = g.cellCenter(ix, iy);
                    const double hs = 0.5 * g.cell_size;
                    if (!occ(ix + 1, iy))
                    {
                        out << "<line x1=\"" << X(c.x() + hs) << "\" y1=\"" << Y(c.y() - hs)
                            << "\" x2=\"" << X(c.x() + hs) << "\" y2=\"" << Y(c.y() + hs) << "\"/>\n";
                    }
                    if (!occ(ix - 1, iy))
                    {
                        out << "<line x1=\"" << X(c.x() - hs) << "\" y1=\"" << Y(c.y() - hs)
                            << "\" x2=\"" << X(c.x() - hs) << "\" y2=\"" << Y(c.y() + hs) << "\"/>\n";
                    }
                    if (!occ(ix, iy + 1))
                    {
                        out << "<line x1=\"" << X(c.x() - hs) << "\" y1=\"" << Y(c.y() + hs)
                            << "\" x2=\"" << X(c.x() + hs) << "\" y2=\"" << Y(c.y() + hs) << "\"/>\n";
                    }
                    if (!occ(ix, iy - 1))
                    {
                        out << "<line x1=\"" << X(c.x() - hs) << "\" y1=\"" << Y(c.y() - hs)
                            << "\" x2=\"" << X(c.x() + hs) << "\" y2=\"" << Y(c.y() - hs) << "\"/>\n";
                    }
                }
            }
            out << "</g>\n";
        }

        if (astar != nullptr && astar->status == AStarStatus::Success)
        {
            out << "<g fill=\"#d9a441\">\n";
            for (const AStarNode &n : astar->nodes)
            {
                const Vec2 c = g.cellCenter(n.ix, n.iy);
                out << "<circle cx=\"" << X(c.x()) << "\" cy=\"" << Y(c.y()) << "\" r=\""
                    << 0.3 * g.cell_size << "\"/>\n";
            }
            out << "</g>\n";
        }

        const auto drawTrajectory = [&](const Trajectory &traj, const char *color, double width)
        {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
                << "\" points=\"";
            const int samples = std::max(64, 16 * traj.segments());
            for (int i = 0; i <= samples; ++i)
            {
                const double t = traj.totalDuration() * i / samples;
                const Eigen::VectorXd p = traj.evalClamped(t, 0);
                out << X(p(0)) << ',' << Y(p(1)) << ' ';
            }
            out << "\"/>\n";
        };
        if (initial != nullptr)
        {
            drawTrajectory(*initial, "#b06ab3", 0.4 * g.cell_size);
        }
        if (final_traj != nullptr)
        {
            drawTrajectory(*final_traj, "#2c7a3f", 0.5 * g.cell_size);
        }

        const auto drawPose = [&](const Pose2 &p, const char *color)
        {
            out << "<circle cx=\"" << X(p.translation.x()) << "\" cy=\"" << Y(p.translation.y())
                << "\" r=\"" << 0.8 * g.cell_size << "\" fill=\"" << color << "\"/>\n";
        };
        drawPose(scene.start, "#1f77b4");
        drawPose(scene.goal, "#d62728");
        out << "</svg>\n";
        writeTextFile(path, out.str());
    }

} // namespace svsdf::io
