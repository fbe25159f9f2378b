#pragma once

#include <string>

#include "liftplan/pddl.hpp"

namespace liftplan::testing {

inline const char* kBlocksDomain = R"(
(define (domain blocksworld)
  (:requirements :strips)
  (:predicates (clear ?x) (ontable ?x) (handempty) (holding ?x) (on ?x ?y))
  (:action pickup
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
  (:action putdown
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y)))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y)))))
)";

/// Two blocks on the table, goal a on b.
inline const char* kBw2 = R"(
(define (problem bw2) (:domain blocksworld)
  (:objects a b)
  (:init (ontable a) (ontable b) (clear a) (clear b) (handempty))
  (:goal (and (on a b))))
)";

/// Tower c-b-a (a on table), goal reversed.
inline const char* kBw3Reverse = R"(
(define (problem bw3) (:domain blocksworld)
  (:objects a b c)
  (:init (ontable a) (on b a) (on c b) (clear c) (handempty))
  (:goal (and (on a b) (on b c))))
)";

inline const char* kTrucksDomain = R"(
(define (domain trucks)
  (:requirements :strips :typing)
  (:types location locatable - object
          vehicle package - locatable
          truck - vehicle)
  (:predicates (at ?x - locatable ?l - location) (in ?p - package ?v - vehicle)
               (road ?a - location ?b - location))
  (:action drive
    :parameters (?t - truck ?from - location ?to - location)
    :precondition (and (at ?t ?from) (road ?from ?to))
    :effect (and (not (at ?t ?from)) (at ?t ?to)))
  (:action load
    :parameters (?p - package ?t - truck ?l - location)
    :precondition (and (at ?p ?l) (at ?t ?l))
    :effect (and (not (at ?p ?l)) (in ?p ?t)))
  (:action unload
    :parameters (?p - package ?t - truck ?l - location)
    :precondition (and (in ?p ?t) (at ?t ?l))
    :effect (and (not (in ?p ?t)) (at ?p ?l))))
)";

inline const char* kTrucksProblem = R"(
(define (problem trucks-1) (:domain trucks)
  (:objects l1 l2 l3 - location t1 - truck p1 p2 - package)
  (:init (at t1 l1) (at p1 l1) (at p2 l2)
         (road l1 l2) (road l2 l1) (road l2 l3) (road l3 l2))
  (:goal (and (at p1 l3) (at p2 l3))))
)";

/// Spanner-like: the static `link` relation drives movement.
inline const char* kSpannerDomain = R"(
(define (domain spanner)
  (:requirements :strips :equality)
  (:predicates (at ?m ?l) (link ?a ?b) (carrying ?s) (spanner-at ?s ?l)
               (loose ?n) (tightened ?n) (nut-at ?n ?l) (man ?m))
  (:action walk
    :parameters (?m ?from ?to)
    :precondition (and (man ?m) (at ?m ?from) (link ?from ?to) (not (= ?from ?to)))
    :effect (and (not (at ?m ?from)) (at ?m ?to)))
  (:action pickup_spanner
    :parameters (?m ?s ?l)
    :precondition (and (man ?m) (at ?m ?l) (spanner-at ?s ?l))
    :effect (and (not (spanner-at ?s ?l)) (carrying ?s)))
  (:action tighten
    :parameters (?m ?s ?n ?l)
    :precondition (and (man ?m) (at ?m ?l) (nut-at ?n ?l) (carrying ?s) (loose ?n))
    :effect (and (not (loose ?n)) (not (carrying ?s)) (tightened ?n))))
)";

inline const char* kSpannerProblem = R"(
(define (problem spanner-1) (:domain spanner)
  (:objects bob shed loc1 gate s1 s2 n1)
  (:init (man bob) (at bob shed) (link shed loc1) (link loc1 gate)
         (spanner-at s1 loc1) (spanner-at s2 shed) (loose n1) (nut-at n1 gate))
  (:goal (and (tightened n1))))
)";

inline const char* kForallDomain = R"(
(define (domain bad)
  (:requirements :strips :universal-preconditions)
  (:predicates (p ?x))
  (:action a :parameters (?x) :precondition (forall (?y) (p ?y)) :effect (p ?x)))
)";

inline const char* kNoActionDomain = R"(
(define (domain empty)
  (:requirements :strips)
  (:predicates (p ?x) (q ?x)))
)";

inline const char* kNoActionProblem = R"(
(define (problem empty-1) (:domain empty)
  (:objects o1 o2)
  (:init (p o1))
  (:goal (and (q o1))))
)";

inline Task load(const char* domain, const char* problem) {
  return parse_instance(problem, parse_domain(domain));
}

inline Task bw2() { return load(kBlocksDomain, kBw2); }

}  // namespace liftplan::testing
