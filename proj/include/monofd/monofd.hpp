#pragma once

#include "monofd/errors.hpp"
#include "monofd/geometry.hpp"
#include "monofd/spatial_index.hpp"
#include "monofd/point_cloud.hpp"
#include "monofd/hull.hpp"
#include "monofd/stencil.hpp"
#include "monofd/fd.hpp"
#include "monofd/hessian.hpp"
#include "monofd/envelope.hpp"
#include "monofd/ordering.hpp"
#include "monofd/solvers.hpp"
#include "monofd/pde.hpp"
#include "monofd/meshio.hpp"
#include "monofd/disc_mesh.hpp"
#include "monofd/reference.hpp"
#include "monofd/harness.hpp"
