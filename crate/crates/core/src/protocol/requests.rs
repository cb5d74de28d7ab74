use alloc::vec::Vec;

use rand::Rng as _;

use super::ProtocolError;
use crate::catalog::ContentCatalog;
use crate::math::ln;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Request {
    pub time: f64,
    pub user: usize,
    pub content: usize,
}

/// Time-ordered content requests, contents drawn from the catalog popularity.
#[derive(Debug, Clone, PartialEq)]
pub struct RequestStream {
    requests: Vec<Request>,
    /// Requests per second per user (for fixed-count streams, the implied rate).
    pub rate: f64,
    pub seed: u64,
}

fn sample_content(cdf: &[f64], rng: &mut crate::Rng) -> usize {
    let u: f64 = rng.gen();
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

impl RequestStream {
    /// Homogeneous Poisson requests of `rate` per user over `[0, horizon]`.
    /// Requests whose deadline `t + ttl` falls after the horizon are dropped.
    pub fn poisson(
        catalog: &ContentCatalog,
        users: usize,
        rate: f64,
        horizon: f64,
        ttl: f64,
        seed: u64,
    ) -> Result<Self, ProtocolError> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(ProtocolError::InvalidParameter("request rate must be positive"));
        }
        let cdf = catalog.cdf();
        let mut rng = crate::rng_from_seed(seed);
        let mut requests = Vec::new();
        for user in 0..users {
            let mut t = 0.0;
            loop {
                t += -ln(1.0 - rng.gen::<f64>()) / rate;
                if t + ttl > horizon {
                    break;
                }
                let content = sample_content(&cdf, &mut rng);
                requests.push(Request { time: t, user, content });
            }
        }
        Ok(Self::from_requests(requests, rate, seed))
    }

    /// Exactly `count` requests at uniform times in `[0, horizon - ttl]`
    /// from uniformly chosen users (a Poisson stream conditioned on its size).
    pub fn fixed_count(
        catalog: &ContentCatalog,
        users: usize,
        count: usize,
        horizon: f64,
        ttl: f64,
        seed: u64,
    ) -> Result<Self, ProtocolError> {
        if users == 0 {
            return Err(ProtocolError::InvalidParameter("at least one user is required"));
        }
        let span = horizon - ttl;
        if !(span > 0.0) {
            return Err(ProtocolError::InvalidParameter("horizon must exceed the ttl"));
        }
        let cdf = catalog.cdf();
        let mut rng = crate::rng_from_seed(seed);
        let requests = (0..count)
            .map(|_| {
                let time = span * rng.gen::<f64>();
                let user = rng.gen_range(0..users);
                let content = sample_content(&cdf, &mut rng);
                Request { time, user, content }
            })
            .collect();
        Ok(Self::from_requests(
            requests,
            count as f64 / (span * users as f64),
            seed,
        ))
    }

    pub fn from_requests(mut requests: Vec<Request>, rate: f64, seed: u64) -> Self {
        requests.sort_by(|a, b| a.time.partial_cmp(&b.time).unwrap().then(a.user.cmp(&b.user)));
        Self { requests, rate, seed }
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }
}
