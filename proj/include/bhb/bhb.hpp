#ifndef BHB_BHB_HPP
#define BHB_BHB_HPP

#include <bhb/errors.hpp>
#include <bhb/lattice.hpp>
#include <bhb/schedule.hpp>
#include <bhb/gaussian.hpp>
#include <bhb/parallel.hpp>
#include <bhb/charging.hpp>
#include <bhb/scrambling.hpp>
#include <bhb/exact.hpp>
#include <bhb/config.hpp>
#include <bhb/report.hpp>

#endif // BHB_BHB_HPP
