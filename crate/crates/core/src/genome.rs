//! Candidate designs as partitions of a problem's elements into classes.
//!
//! Element positions follow [`DesignProblem`] order: attributes first, then
//! methods. Every operation returns a fresh solution that satisfies the
//! partition invariants (dense class indices, no empty class).

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem::DesignProblem;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenomeError {
    #[error("class count {k} outside 2..={elements}")]
    ClassCountOutOfRange { k: usize, elements: usize },
    #[error("assignment has {got} entries, problem has {expected} elements")]
    LengthMismatch { expected: usize, got: usize },
    #[error("element {element} assigned to class {class}, but k = {k}")]
    ClassOutOfRange { element: usize, class: usize, k: usize },
    #[error("class {0} is empty")]
    EmptyClass(usize),
    #[error("parents are bound to different problems or class counts")]
    ParentMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DesignSolution {
    class_count: usize,
    attribute_count: usize,
    assignment: Vec<usize>,
}

impl DesignSolution {
    /// Wraps an explicit assignment, rejecting anything that is not a valid
    /// k-partition of the problem's elements.
    pub fn from_assignment(
        problem: &DesignProblem,
        class_count: usize,
        assignment: Vec<usize>,
    ) -> Result<Self, GenomeError> {
        check_class_count(problem, class_count)?;
        if assignment.len() != problem.element_count() {
            return Err(GenomeError::LengthMismatch {
                expected: problem.element_count(),
                got: assignment.len(),
            });
        }
        let mut sizes = vec![0usize; class_count];
        for (element, &class) in assignment.iter().enumerate() {
            if class >= class_count {
                return Err(GenomeError::ClassOutOfRange {
                    element,
                    class,
                    k: class_count,
                });
            }
            sizes[class] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(GenomeError::EmptyClass(empty));
        }
        Ok(Self {
            class_count,
            attribute_count: problem.attribute_count(),
            assignment,
        })
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn element_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.assignment[element]
    }

    pub fn attribute_class(&self, attribute: usize) -> usize {
        self.assignment[attribute]
    }

    pub fn method_class(&self, method: usize) -> usize {
        self.assignment[self.attribute_count + method]
    }

    /// True when the solution was built for a problem of this shape.
    pub fn is_bound_to(&self, problem: &DesignProblem) -> bool {
        self.attribute_count == problem.attribute_count() && self.assignment.len() == problem.element_count()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// Named view used by the service, the UI and the episode log.
    pub fn to_classes(&self, problem: &DesignProblem) -> CandidateDesign {
        let mut classes: Vec<ClassView> = (0..self.class_count)
            .map(|index| ClassView {
                index,
                attributes: Vec::new(),
                methods: Vec::new(),
            })
            .collect();
        for (a, name) in problem.attributes().iter().enumerate() {
            classes[self.attribute_class(a)].attributes.push(name.clone());
        }
        for (m, name) in problem.methods().iter().enumerate() {
            classes[self.method_class(m)].methods.push(name.clone());
        }
        CandidateDesign { classes }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassView {
    pub index: usize,
    pub attributes: Vec<String>,
    pub methods: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateDesign {
    pub classes: Vec<ClassView>,
}

fn check_class_count(problem: &DesignProblem, k: usize) -> Result<(), GenomeError> {
    let elements = problem.element_count();
    if k < 2 || k > elements {
        return Err(GenomeError::ClassCountOutOfRange { k, elements });
    }
    Ok(())
}

/// Fills every empty class by taking one element from a largest class.
///
/// Empty classes are handled in ascending index order. The donor is the
/// largest class (lowest index on ties) and the element moved is the donor's
/// first member in problem order.
fn repair(assignment: &mut [usize], class_count: usize) {
    let mut sizes = vec![0usize; class_count];
    for &c in assignment.iter() {
        sizes[c] += 1;
    }
    for empty in 0..class_count {
        if sizes[empty] != 0 {
            continue;
        }
        let donor = (0..class_count)
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
            .expect("class_count >= 2");
        debug_assert!(sizes[donor] >= 2);
        let element = assignment
            .iter()
            .position(|&c| c == donor)
            .expect("donor class is non-empty");
        assignment[element] = empty;
        sizes[donor] -= 1;
        sizes[empty] += 1;
    }
}

/// Uniform independent class per element, then repair.
pub fn random_solution<R: Rng + ?Sized>(
    problem: &DesignProblem,
    class_count: usize,
    rng: &mut R,
) -> Result<DesignSolution, GenomeError> {
    check_class_count(problem, class_count)?;
    let mut assignment: Vec<usize> = (0..problem.element_count())
        .map(|_| rng.gen_range(0..class_count))
        .collect();
    repair(&mut assignment, class_count);
    Ok(DesignSolution {
        class_count,
        attribute_count: problem.attribute_count(),
        assignment,
    })
}

/// Moves each element, with probability `rate`, to a uniformly chosen
/// different class.
pub fn mutate<R: Rng + ?Sized>(solution: &DesignSolution, rate: f64, rng: &mut R) -> DesignSolution {
    let k = solution.class_count;
    let rate = rate.clamp(0.0, 1.0);
    let mut assignment = solution.assignment.clone();
    for class in assignment.iter_mut() {
        if rng.gen_bool(rate) {
            let pick = rng.gen_range(0..k - 1);
            *class = if pick >= *class { pick + 1 } else { pick };
        }
    }
    repair(&mut assignment, k);
    DesignSolution {
        assignment,
        ..solution.clone()
    }
}

/// Uniform crossover on the assignment vector, then repair.
pub fn crossover<R: Rng + ?Sized>(
    parent_a: &DesignSolution,
    parent_b: &DesignSolution,
    rng: &mut R,
) -> Result<DesignSolution, GenomeError> {
    if parent_a.class_count != parent_b.class_count
        || parent_a.attribute_count != parent_b.attribute_count
        || parent_a.assignment.len() != parent_b.assignment.len()
    {
        return Err(GenomeError::ParentMismatch);
    }
    let mut assignment: Vec<usize> = parent_a
        .assignment
        .iter()
        .zip(&parent_b.assignment)
        .map(|(&a, &b)| if rng.gen_bool(0.5) { a } else { b })
        .collect();
    repair(&mut assignment, parent_a.class_count);
    Ok(DesignSolution {
        assignment,
        ..parent_a.clone()
    })
}
