#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "ffs3d/errors.hpp"
#include "ffs3d/frustum.hpp"
#include "testutil.hpp"

using namespace ffs3d;

namespace {

Box2D make_box(double x0, double y0, double x1, double y1) {
    Box2D box;
    box.x_min = x0;
    box.y_min = y0;
    box.x_max = x1;
    box.y_max = y1;
    return box;
}

bool contains_normal(const Frustum& f, const Eigen::Vector3d& expected) {
    for (const auto& n : f.side_planes)
        if (n.isApprox(expected, 1e-9)) return true;
    return false;
}

}  // namespace

TEST_CASE("build_frustum with unit focal length") {
    const CalibrationSet calib = CalibrationSet::identity();

    SUBCASE("box centered on the principal point looks straight ahead") {
        const Frustum f = build_frustum(make_box(-1, -1, 1, 1), calib, 70.0);
        CHECK(f.axis.isApprox(Eigen::Vector3d::UnitZ(), 1e-12));
        CHECK(f.origin.isZero(1e-12));
        CHECK(f.near == 0.0);
        CHECK(f.far == 70.0);
    }
    SUBCASE("side planes of the (-1,-1,1,1) box sit at 45 degrees") {
        // Left plane spans corner rays (-1,-1,1) and (-1,1,1); their cross
        // product normalizes to (1,0,1)/sqrt(2). The other three follow by
        // symmetry.
        const Frustum f = build_frustum(make_box(-1, -1, 1, 1), calib, 70.0);
        const double s = 1.0 / std::sqrt(2.0);
        CHECK(contains_normal(f, Eigen::Vector3d(s, 0, s)));
        CHECK(contains_normal(f, Eigen::Vector3d(-s, 0, s)));
        CHECK(contains_normal(f, Eigen::Vector3d(0, s, s)));
        CHECK(contains_normal(f, Eigen::Vector3d(0, -s, s)));
    }
    SUBCASE("unit-length invariants") {
        const Frustum f = build_frustum(make_box(3, -2, 9, 4), calib, 55.0);
        CHECK(f.axis.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.axis.z() > 0.0);
        for (const auto& n : f.side_planes)
            CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("degenerate boxes are rejected") {
        CHECK_THROWS_AS(build_frustum(make_box(1, 1, 1, 5), calib, 70.0), DegenerateBoxError);
        CHECK_THROWS_AS(build_frustum(make_box(1, 5, 3, 5), calib, 70.0), DegenerateBoxError);
        CHECK_THROWS_AS(build_frustum(make_box(4, 4, 2, 8), calib, 70.0), DegenerateBoxError);
    }
}

TEST_CASE("build_frustum folds the P2 translation column into the origin") {
    // P2 = K [I | t]: every ray through pixel (u, v) passes through -t, so
    // the frustum origin must shift off the rect-frame origin.
    CalibrationSet calib = testutil::kitti_like_calib();
    const Eigen::Matrix3d k = calib.P2.leftCols<3>();
    const Eigen::Vector3d expected_origin = -(k.inverse() * calib.P2.col(3));

    const Frustum f = build_frustum(make_box(500, 150, 700, 250), calib, 70.0);
    CHECK(f.origin.isApprox(expected_origin, 1e-9));
    CHECK(std::abs(f.origin.x()) > 0.01);  // the baseline offset is not negligible

    // A point on the axis projects back to the box center pixel.
    const Eigen::Vector3d p = f.origin + 30.0 * f.axis;
    const Eigen::Vector3d uvw = calib.P2 * p.homogeneous();
    CHECK(uvw.x() / uvw.z() == doctest::Approx(600.0).epsilon(1e-9));
    CHECK(uvw.y() / uvw.z() == doctest::Approx(200.0).epsilon(1e-9));
}

TEST_CASE("axis_coordinate is the dot product with the axis") {
    Frustum f;
    f.origin = Eigen::Vector3d::Zero();
    f.axis = Eigen::Vector3d::UnitZ();
    f.near = 0.0;
    f.far = 100.0;

    CHECK(axis_coordinate(f, Point3{3, 4, 12, 0}) == 12.0);
    CHECK(axis_coordinate(f, Point3{0, 0, 0, 0}) == 0.0);
    CHECK(axis_coordinate(f, Point3{0, 0, -5, 0}) == -5.0);

    f.axis = Eigen::Vector3d(0.0, 0.6, 0.8);
    CHECK(axis_coordinate(f, Point3{0, 3, 4, 0}) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("point_in_frustum half-space and range tests") {
    const CalibrationSet calib = CalibrationSet::identity();
    const Frustum f = build_frustum(make_box(-1, -1, 1, 1), calib, 70.0);

    CHECK(point_in_frustum(f, Point3{0, 0, 10, 0}));
    CHECK_FALSE(point_in_frustum(f, Point3{0, 0, 71, 0}));   // beyond far
    CHECK_FALSE(point_in_frustum(f, Point3{10, 0, 1, 0}));   // outside side plane
    CHECK_FALSE(point_in_frustum(f, Point3{0, 0, -3, 0}));   // behind the camera
    CHECK(point_in_frustum(f, Point3{0, 0, 70, 0}));         // boundary is inside
    CHECK(point_in_frustum(f, Point3{0, 0, 0, 0}));          // origin is inside
    CHECK(point_in_frustum(f, Point3{10, 10, 10, 0}));       // on the corner ray
}

TEST_CASE("select_frustum_points") {
    const CalibrationSet calib = CalibrationSet::identity();
    const Frustum f = build_frustum(make_box(-1, -1, 1, 1), calib, 70.0);

    SUBCASE("empty cloud") {
        PointCloud cloud;
        cloud.frame = Frame::RECT_CAM;
        CHECK(select_frustum_points(f, cloud).empty());
    }
    SUBCASE("far-plane cut") {
        PointCloud cloud;
        cloud.frame = Frame::RECT_CAM;
        cloud.points = {Point3{0, 0, 10, 0}, Point3{0, 0, 80, 0}};
        const FrustumSelection sel = select_frustum_points(f, cloud);
        REQUIRE(sel.size() == 1);
        CHECK(sel.indices[0] == 0);
        CHECK(sel.axis_coords[0] == 10.0);
    }
    SUBCASE("LIDAR cloud is rejected") {
        PointCloud cloud;
        cloud.frame = Frame::LIDAR;
        cloud.points = {Point3{0, 0, 10, 0}};
        CHECK_THROWS_AS(select_frustum_points(f, cloud), FrameError);
    }
}

TEST_CASE("selection equals the brute-force membership oracle") {
    testutil::Rng rng(4242);
    std::uniform_real_distribution<double> coord(-60.0, 60.0);
    std::uniform_real_distribution<double> depth(-10.0, 90.0);
    const CalibrationSet calib = testutil::kitti_like_calib();
    const Frustum f = build_frustum(make_box(420, 140, 780, 260), calib, 70.0);

    PointCloud cloud;
    cloud.frame = Frame::RECT_CAM;
    for (int i = 0; i < 1000; ++i)
        cloud.points.push_back(Point3{coord(rng) / 4.0, coord(rng) / 8.0, depth(rng), 0});

    const FrustumSelection sel = select_frustum_points(f, cloud);
    const FrustumSelection expected = testutil::oracle_select(f, cloud);
    REQUIRE(sel.size() == expected.size());
    CHECK(sel.indices == expected.indices);
    CHECK(sel.axis_coords == expected.axis_coords);
    CHECK(sel.size() > 0);  // the scene must actually exercise the frustum
    CHECK(sel.size() < cloud.size());
}

TEST_CASE("membership implies the axis coordinate lies in [near, far]") {
    testutil::Rng rng(31);
    std::uniform_real_distribution<double> pix_u(0.0, 1200.0);
    std::uniform_real_distribution<double> pix_v(0.0, 370.0);
    std::uniform_real_distribution<double> size(20.0, 300.0);
    std::uniform_real_distribution<double> coord(-80.0, 80.0);
    const CalibrationSet calib = testutil::kitti_like_calib();

    for (int run = 0; run < 50; ++run) {
        const double u0 = pix_u(rng), v0 = pix_v(rng);
        const Frustum f = build_frustum(make_box(u0, v0, u0 + size(rng), v0 + size(rng)),
                                        calib, 70.0);
        for (int i = 0; i < 40; ++i) {
            const Point3 p{coord(rng), coord(rng) / 4.0, coord(rng), 0};
            if (point_in_frustum(f, p)) {
                const double t = axis_coordinate(f, p);
                CHECK(t >= f.near);
                CHECK(t <= f.far);
            }
        }
    }
}

TEST_CASE("side planes contain their corner rays and face inward") {
    // A plane through the origin containing two corner rays is unique up to
    // sign, and the inward orientation fixes the sign; together that makes
    // the half-spaces independent of corner traversal order.
    testutil::Rng rng(56);
    std::uniform_real_distribution<double> pix_u(0.0, 1100.0);
    std::uniform_real_distribution<double> pix_v(0.0, 300.0);
    std::uniform_real_distribution<double> size(10.0, 250.0);
    const CalibrationSet calib = testutil::kitti_like_calib();
    const Eigen::Matrix3d k_inv = calib.P2.leftCols<3>().inverse();

    for (int run = 0; run < 30; ++run) {
        const double u0 = pix_u(rng), v0 = pix_v(rng);
        const double u1 = u0 + size(rng), v1 = v0 + size(rng);
        const Frustum f = build_frustum(make_box(u0, v0, u1, v1), calib, 70.0);

        const std::array<Eigen::Vector3d, 4> rays = {
            k_inv * Eigen::Vector3d(u0, v0, 1.0), k_inv * Eigen::Vector3d(u1, v0, 1.0),
            k_inv * Eigen::Vector3d(u1, v1, 1.0), k_inv * Eigen::Vector3d(u0, v1, 1.0)};
        for (const auto& ray : rays) {
            int containing = 0;
            for (const auto& n : f.side_planes)
                if (std::abs(n.dot(ray.normalized())) < 1e-9) ++containing;
            CHECK(containing == 2);  // each corner ray lies in two planes
        }
        for (const auto& n : f.side_planes) CHECK(n.dot(f.axis) > 0.0);
    }
}

TEST_CASE("dilated grows the box symmetrically") {
    const Box2D box = make_box(10, 20, 30, 50);
    const Box2D grown = dilated(box, 5.0);
    CHECK(grown.x_min == 5.0);
    CHECK(grown.y_min == 15.0);
    CHECK(grown.x_max == 35.0);
    CHECK(grown.y_max == 55.0);
    const Box2D same = dilated(box, 0.0);
    CHECK(same.x_min == box.x_min);
    CHECK(same.y_max == box.y_max);
}

TEST_CASE("every on-axis point within [near, far] is inside") {
    testutil::Rng rng(77);
    std::uniform_real_distribution<double> pix_u(0.0, 1100.0);
    std::uniform_real_distribution<double> pix_v(0.0, 300.0);
    std::uniform_real_distribution<double> size(10.0, 200.0);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    const CalibrationSet calib = testutil::kitti_like_calib();

    for (int run = 0; run < 50; ++run) {
        const double u0 = pix_u(rng), v0 = pix_v(rng);
        const Frustum f = build_frustum(make_box(u0, v0, u0 + size(rng), v0 + size(rng)),
                                        calib, 70.0);
        for (const auto& n : f.side_planes) CHECK(n.dot(f.axis) > 0.0);
        for (int i = 0; i < 20; ++i) {
            const Eigen::Vector3d p = f.origin + (frac(rng) * f.far) * f.axis;
            CHECK(point_in_frustum(f, Point3{p.x(), p.y(), p.z(), 0}));
        }
    }
}
