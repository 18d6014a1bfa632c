#include <doctest.h>

#include "semlift/errors.hpp"
#include "semlift/geometry.hpp"
#include "test_helpers.hpp"

using namespace semlift;
using namespace semlift::testing;

namespace {

CameraModel simple_camera() {
  CameraModel cam;
  cam.focal_x = cam.focal_y = 100.0;
  cam.principal_x = 320.0;
  cam.principal_y = 240.0;
  cam.width = 640;
  cam.height = 480;
  return cam;
}

DistortionCoeffs moderate_coeffs(std::mt19937_64& rng) {
  DistortionCoeffs d;
  d.k1 = uniform(rng, -0.2, 0.2);
  d.k2 = uniform(rng, -0.05, 0.05);
  d.p1 = uniform(rng, -0.01, 0.01);
  d.p2 = uniform(rng, -0.01, 0.01);
  return d;
}

}  // namespace

TEST_CASE("distort_normalized zero coefficients is the identity") {
  DistortionCoeffs zero;
  const Eigen::Vector2d p(0.5, 0.0);
  CHECK(distort_normalized(p, zero) == p);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector2d q(uniform(rng, -2, 2), uniform(rng, -2, 2));
    CHECK(distort_normalized(q, zero) == q);
  }
}

TEST_CASE("distort_normalized fixes the optical axis") {
  DistortionCoeffs d{0.3, -0.1, 0.05, 0.02, -0.03};
  const Eigen::Vector2d origin(0.0, 0.0);
  CHECK(distort_normalized(origin, d) == origin);
}

TEST_CASE("distort_normalized radial polynomial value") {
  // r^2 = 0.25, x' = 0.5 * (1 + 0.1 * 0.25) = 0.5125
  DistortionCoeffs d;
  d.k1 = 0.1;
  const Eigen::Vector2d out = distort_normalized({0.5, 0.0}, d);
  CHECK(out.x() == doctest::Approx(0.5125).epsilon(1e-14));
  CHECK(out.y() == doctest::Approx(0.0));
}

TEST_CASE("undistort_normalized identity and inverse") {
  DistortionCoeffs zero;
  CHECK(undistort_normalized({0.5, 0.0}, zero) == Eigen::Vector2d(0.5, 0.0));

  DistortionCoeffs d;
  d.k1 = 0.1;
  const Eigen::Vector2d q = undistort_normalized({0.5125, 0.0}, d);
  CHECK(std::abs(q.x() - 0.5) < 1e-8);
  CHECK(std::abs(q.y()) < 1e-8);
}

TEST_CASE("undistort then distort round trip inside the unit disc") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const DistortionCoeffs d = moderate_coeffs(rng);
    Eigen::Vector2d p;
    do {
      p = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
    } while (p.norm() > 1.0);
    const Eigen::Vector2d q = undistort_normalized(distort_normalized(p, d), d);
    CHECK((q - p).norm() < 1e-8);
  }
}

TEST_CASE("distort after undistort returns the input point") {
  std::mt19937_64 rng(13);
  DistortionCoeffs d;
  d.k1 = 0.08;
  d.k2 = 0.01;
  d.p1 = 0.002;
  d.p2 = -0.001;
  for (int i = 0; i < 1000; ++i) {
    Eigen::Vector2d p;
    do {
      p = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
    } while (p.norm() > 1.0);
    const Eigen::Vector2d q = undistort_normalized(p, d, 1e-12, 100);
    CHECK((distort_normalized(q, d) - p).norm() < 1e-10);
  }
}

TEST_CASE("undistort_normalized reports non-convergence") {
  DistortionCoeffs d;
  d.k1 = -5.0;  // folds the model well inside the unit disc
  CHECK_THROWS_AS(undistort_normalized({0.9, 0.0}, d, 1e-12, 5), NonConvergence);
}

TEST_CASE("project hits the principal point on the optical axis") {
  const CameraModel cam = simple_camera();
  const auto px = project({0.0, 0.0, 5.0}, PoseSE3::identity(), cam, false);
  REQUIRE(px.has_value());
  CHECK(px->u == doctest::Approx(320.0));
  CHECK(px->v == doctest::Approx(240.0));
  CHECK(px->depth == doctest::Approx(5.0));
}

TEST_CASE("project pinhole algebra") {
  const CameraModel cam = simple_camera();
  const auto px = project({1.0, 0.0, 5.0}, PoseSE3::identity(), cam, false);
  REQUIRE(px.has_value());
  CHECK(px->u == doctest::Approx(340.0));  // 100 * (1/5) + 320
  CHECK(px->v == doctest::Approx(240.0));
  CHECK(px->depth == doctest::Approx(5.0));
}

TEST_CASE("project rejects points behind the camera") {
  const CameraModel cam = simple_camera();
  CHECK(!project({0.0, 0.0, -1.0}, PoseSE3::identity(), cam).has_value());
  CHECK(!project({0.0, 0.0, 0.0}, PoseSE3::identity(), cam).has_value());
}

TEST_CASE("project is scale invariant along the ray") {
  const CameraModel cam = simple_camera();
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d x(uniform(rng, -3, 3), uniform(rng, -3, 3),
                            uniform(rng, 1, 20));
    const auto a = project(x, PoseSE3::identity(), cam, false);
    const auto b = project(2.0 * x, PoseSE3::identity(), cam, false);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(std::abs(a->u - b->u) < 1e-9);
    CHECK(std::abs(a->v - b->v) < 1e-9);
  }
}

TEST_CASE("project commutes with pose composition") {
  const CameraModel cam = simple_camera();
  std::mt19937_64 rng(19);
  for (int i = 0; i < 200; ++i) {
    const PoseSE3 t = make_pose(
        random_rotation(rng),
        {uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2)});
    const PoseSE3 pose = make_pose(rot_z(uniform(rng, -180, 180)),
                                   {uniform(rng, -1, 1), uniform(rng, -1, 1), 0});
    const Eigen::Vector3d x(uniform(rng, -3, 3), uniform(rng, -3, 3),
                            uniform(rng, 5, 20));
    const Eigen::Vector3d moved = t.rotation * x + t.translation;
    const auto direct = project(moved, pose, cam, true);
    const auto composed = project(x, compose(pose, t), cam, true);
    REQUIRE(direct.has_value() == composed.has_value());
    if (direct) {
      CHECK(std::abs(direct->u - composed->u) < 1e-9);
      CHECK(std::abs(direct->v - composed->v) < 1e-9);
      CHECK(std::abs(direct->depth - composed->depth) < 1e-9);
    }
  }
}

TEST_CASE("compose and invert form a group") {
  CHECK(compose(PoseSE3::identity(), PoseSE3::identity()).rotation.isIdentity(1e-15));

  const PoseSE3 a = make_pose(rot_z(90.0), {1.0, 0.0, 0.0});
  const PoseSE3 round = compose(invert(a), a);
  CHECK((round.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(round.translation.cwiseAbs().maxCoeff() < 1e-12);

  const PoseSE3 ab = compose(make_pose(rot_z(30.0), Eigen::Vector3d::Zero()),
                             make_pose(rot_z(60.0), Eigen::Vector3d::Zero()));
  CHECK((ab.rotation - rot_z(90.0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("compose(a, invert(a)) is the identity for random poses") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 500; ++i) {
    const PoseSE3 a = make_pose(
        random_rotation(rng),
        {uniform(rng, -10, 10), uniform(rng, -10, 10), uniform(rng, -10, 10)});
    const PoseSE3 round = compose(a, invert(a));
    CHECK((round.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(round.translation.cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("quaternion_to_rotation canonical cases") {
  CHECK(quaternion_to_rotation(1, 0, 0, 0).isIdentity(1e-15));

  const Eigen::Matrix3d half_turn = quaternion_to_rotation(0, 0, 0, 1);
  Eigen::Matrix3d expected;
  expected << -1, 0, 0, 0, -1, 0, 0, 0, 1;
  CHECK((half_turn - expected).cwiseAbs().maxCoeff() < 1e-15);

  const Eigen::Matrix3d quarter = quaternion_to_rotation(0.7071, 0, 0, 0.7071);
  CHECK((quarter - rot_z(90.0)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("quaternion_to_rotation rejects the zero quaternion") {
  CHECK_THROWS_AS(quaternion_to_rotation(0, 0, 0, 0), ZeroQuaternion);
}

TEST_CASE("quaternion conversion stays orthonormal") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 10000; ++i) {
    const Eigen::Matrix3d r =
        quaternion_to_rotation(uniform(rng, -1, 1), uniform(rng, -1, 1),
                               uniform(rng, -1, 1), uniform(rng, -1, 1));
    CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <
          1e-9);
    CHECK(std::abs(r.determinant() - 1.0) < 1e-9);
  }
}

TEST_CASE("CameraModel validation catches bad intrinsics") {
  CameraModel cam = simple_camera();
  CHECK_NOTHROW(cam.validate());
  cam.focal_x = 0.0;
  CHECK_THROWS_AS(cam.validate(), std::invalid_argument);
  cam = simple_camera();
  cam.principal_x = 640.0;
  CHECK_THROWS_AS(cam.validate(), std::invalid_argument);
}
