#pragma once

#include <doctest.h>

#include "pfcone/errors.hpp"

/// Kind of the pfcone::Error thrown by f; fails the test if nothing is thrown.
template <class F>
pfcone::ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const pfcone::Error& e) {
    return e.kind();
  }
  FAIL("expected a pfcone::Error");
  return pfcone::ErrorKind::InvalidArgument;
}
