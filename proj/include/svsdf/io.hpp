#ifndef SVSDF_IO_HPP
#define SVSDF_IO_HPP

#include "svsdf/astar.hpp"
#include "svsdf/grid_field.hpp"
#include "svsdf/motion.hpp"
#include "svsdf/planner.hpp"
#include "svsdf/scene.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace svsdf::io
{

    class IoError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Shapes: {"kind": "disk"|"box"|"convex_polygon"|"polygon"|"union"|
    //          "scaling_disk", ...params}; polygons carry CCW vertex lists.
    Shape shapeFromJson(const nlohmann::json &j);
    nlohmann::json shapeToJson(const Shape &shape);
    Shape loadShape(const std::string &path);
    void saveShape(const Shape &shape, const std::string &path);

    // Scenes: PGM occupancy (0 = occupied, 255 = free, threshold 128) or JSON
    // with a rect/disc obstacle list or base64-packed occupancy bits.
    Scene loadScene(const std::string &path);
    Scene sceneFromJson(const nlohmann::json &j);
    nlohmann::json sceneToJson(const Scene &scene);
    void saveScene(const Scene &scene, const std::string &path);

    std::vector<uint8_t> readPgm(const std::string &path, int &nx, int &ny);
    void writePgm(const std::string &path, const std::vector<uint8_t> &gray, int nx, int ny);

    // Field export: raw float32 values with a JSON header and a normalized
    // PGM preview. base_path gets .f32/.json/.pgm suffixes.
    void writeField(const std::string &base_path, const GridSpec &grid,
                    const std::vector<double> &values);
    struct FieldFile
    {
        GridSpec grid;
        std::vector<float> values;
    };
    FieldFile readField(const std::string &base_path);

    // Trajectories: sampled CSV (t, x, y, yaw, vx, vy, yaw_rate) for plotting
    // and an exact JSON form (coefficients + durations) that round-trips.
    void writeTrajectoryCsv(const std::string &path, const Trajectory &traj, double sample_step);
    nlohmann::json trajectoryToJson(const Trajectory &traj);
    Trajectory trajectoryFromJson(const nlohmann::json &j);
    void saveTrajectory(const Trajectory &traj, const std::string &path);
    Trajectory loadTrajectory(const std::string &path);

    // Motion specs for field evaluation:
    //   {"type": "constant", "pose": {...}, "t_start": 0, "t_end": 1}
    //   {"type": "linear", "from": {...}, "to": {...}, ...}
    //   {"type": "trajectory", "file": "traj.json"}
    Motion motionFromJson(const nlohmann::json &j, const std::string &base_dir = "");
    Motion loadMotion(const std::string &path);

    nlohmann::json reportToJson(const PlanReport &report);

    // Plot-ready overlay: map, search nodes, trajectories and an optional
    // swept-volume outline rasterized from a brute-force occupancy pass.
    void writeSvg(const std::string &path, const Scene &scene,
                  const AStarResult *astar, const Trajectory *initial,
                  const Trajectory *final_traj, const std::vector<uint8_t> *sv_occupancy);

} // namespace svsdf::io

#endif
