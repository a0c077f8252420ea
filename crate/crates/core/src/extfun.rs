//! Extensible type-indexed functions.
//!
//! Cases are registered under a [`TypePattern`] and stored in a bucket keyed
//! by the pattern's head constructor. Each bucket is kept sorted with
//! [`dispatch_order`] so the first matching case is the most specific one,
//! whatever order the cases were registered in. The `Any` pattern is kept
//! apart and only consulted when the head bucket has no match.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::typerep::{dispatch_order, matches, Head, TypePattern, TypeRep};

/// A case body. It receives the queried representation, which is
/// guaranteed to match the pattern the case was registered under.
pub type CaseFn<A, R> = Arc<dyn Fn(&TypeRep, A) -> R + Send + Sync>;

struct Case<A, R> {
    pattern: TypePattern,
    body: CaseFn<A, R>,
}

impl<A, R> Clone for Case<A, R> {
    fn clone(&self) -> Self {
        Case {
            pattern: self.pattern.clone(),
            body: self.body.clone(),
        }
    }
}

type Bucket<A, R> = Arc<Vec<Case<A, R>>>;

struct Registry<A, R> {
    buckets: HashMap<(Head, usize), Bucket<A, R>>,
    fallback: Option<Case<A, R>>,
}

pub struct ExtFun<A, R> {
    doc: String,
    registry: RwLock<Registry<A, R>>,
    probes: AtomicU64,
}

impl<A, R> ExtFun<A, R> {
    /// An empty function; `doc` names it in `NotSupported` errors.
    pub fn create(doc: &str) -> Self {
        ExtFun {
            doc: doc.to_string(),
            registry: RwLock::new(Registry {
                buckets: HashMap::new(),
                fallback: None,
            }),
            probes: AtomicU64::new(0),
        }
    }

    pub fn doc(&self) -> &str {
        &self.doc
    }

    /// Adds a case. A case registered again under an identical pattern
    /// replaces the previous one.
    pub fn extend<F>(&self, pattern: TypePattern, body: F)
    where
        F: Fn(&TypeRep, A) -> R + Send + Sync + 'static,
    {
        self.extend_case(pattern, Arc::new(body))
    }

    pub fn extend_case(&self, pattern: TypePattern, body: CaseFn<A, R>) {
        let case = Case { pattern, body };
        let mut reg = self.registry.write().unwrap();
        let (head, args) = match &case.pattern {
            TypePattern::Any => {
                reg.fallback = Some(case);
                return;
            }
            TypePattern::Con(h, args) => (h.clone(), args.len()),
        };
        let bucket = reg.buckets.entry((head, args)).or_default();
        let mut cases: Vec<Case<A, R>> = bucket.as_ref().clone();
        match cases.binary_search_by(|c| dispatch_order(&c.pattern, &case.pattern)) {
            Ok(i) => cases[i] = case,
            Err(i) => cases.insert(i, case),
        }
        *bucket = Arc::new(cases);
    }

    /// Dispatches to the most specific case matching `ty`.
    pub fn apply(&self, ty: &TypeRep, arg: A) -> Result<R> {
        let (bucket, fallback) = {
            let reg = self.registry.read().unwrap();
            (
                reg.buckets.get(&(ty.head().clone(), ty.args().len())).cloned(),
                reg.fallback.clone(),
            )
        };
        if let Some(bucket) = bucket {
            for case in bucket.iter() {
                self.probes.fetch_add(1, Ordering::Relaxed);
                if matches(&case.pattern, ty) {
                    return Ok((case.body)(ty, arg));
                }
            }
        }
        if let Some(case) = fallback {
            self.probes.fetch_add(1, Ordering::Relaxed);
            return Ok((case.body)(ty, arg));
        }
        Err(Error::NotSupported {
            function: self.doc.clone(),
            ty: ty.to_string(),
        })
    }

    /// `true` when some case (including the fallback) matches `ty`.
    pub fn handles(&self, ty: &TypeRep) -> bool {
        let reg = self.registry.read().unwrap();
        reg.fallback.is_some()
            || reg
                .buckets
                .get(&(ty.head().clone(), ty.args().len()))
                .is_some_and(|b| b.iter().any(|c| matches(&c.pattern, ty)))
    }

    /// Patterns of the bucket `key` belongs to, in dispatch order.
    pub fn bucket_patterns(&self, key: &TypePattern) -> Vec<TypePattern> {
        let reg = self.registry.read().unwrap();
        match key {
            TypePattern::Any => reg.fallback.iter().map(|c| c.pattern.clone()).collect(),
            TypePattern::Con(h, args) => reg
                .buckets
                .get(&(h.clone(), args.len()))
                .map(|b| b.iter().map(|c| c.pattern.clone()).collect())
                .unwrap_or_default(),
        }
    }

    /// Bucket keys currently present, each with all arguments widened to `Any`.
    pub fn bucket_keys(&self) -> Vec<TypePattern> {
        let reg = self.registry.read().unwrap();
        let mut keys: Vec<TypePattern> = reg
            .buckets
            .keys()
            .map(|(h, n)| TypePattern::Con(h.clone(), vec![TypePattern::Any; *n]))
            .collect();
        keys.sort_by(dispatch_order);
        keys
    }

    /// Number of cases examined by `apply` since creation.
    pub fn probe_count(&self) -> u64 {
        self.probes.load(Ordering::Relaxed)
    }
}
