//! Signed, expiring session tokens (JWT, HS256).

use std::sync::Arc;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use jsonwebtoken::{decode, encode, Algorithm, DecodingKey, EncodingKey, Header, Validation};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::accounts::{Accounts, Role, User};

pub const DEFAULT_TOKEN_LIFETIME: Duration = Duration::from_secs(12 * 60 * 60);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuthError {
    #[error("invalid username or password")]
    InvalidCredentials,
    #[error("session token has expired")]
    TokenExpired,
    #[error("session token is missing or invalid")]
    InvalidToken,
    #[error("user `{0}` already exists")]
    DuplicateUser(String),
    #[error("`{0}` is not a valid username")]
    InvalidUsername(String),
    #[error("password must have at least {0} characters")]
    WeakPassword(usize),
    #[error("account storage failure: {0}")]
    Storage(String),
}

/// Seconds since the Unix epoch, injectable for tests.
pub trait Clock: Send + Sync {
    fn now(&self) -> u64;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> u64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claims {
    pub sub: String,
    pub role: Role,
    pub iat: u64,
    pub exp: u64,
}

pub struct TokenService {
    encoding: EncodingKey,
    decoding: DecodingKey,
    lifetime: Duration,
    clock: Arc<dyn Clock>,
}

impl TokenService {
    pub fn new(secret: &[u8], lifetime: Duration, clock: Arc<dyn Clock>) -> Self {
        TokenService {
            encoding: EncodingKey::from_secret(secret),
            decoding: DecodingKey::from_secret(secret),
            lifetime,
            clock,
        }
    }

    pub fn lifetime(&self) -> Duration {
        self.lifetime
    }

    pub fn issue(&self, user: &User) -> String {
        let iat = self.clock.now();
        let claims = Claims {
            sub: user.username.clone(),
            role: user.role,
            iat,
            exp: iat + self.lifetime.as_secs(),
        };
        encode(&Header::new(Algorithm::HS256), &claims, &self.encoding).expect("HS256 signing cannot fail")
    }

    /// Checks signature and expiry. Expiry is judged by the injected clock,
    /// with no leeway.
    pub fn verify(&self, token: &str) -> Result<Claims, AuthError> {
        let mut validation = Validation::new(Algorithm::HS256);
        validation.validate_exp = false;
        validation.required_spec_claims.clear();
        let claims = decode::<Claims>(token, &self.decoding, &validation)
            .map_err(|_| AuthError::InvalidToken)?
            .claims;
        if self.clock.now() >= claims.exp {
            return Err(AuthError::TokenExpired);
        }
        Ok(claims)
    }

    /// Verifies the credentials and issues a token for them.
    pub fn authenticate(&self, accounts: &Accounts, username: &str, password: &str) -> Result<String, AuthError> {
        let user = accounts.verify(username, password)?;
        Ok(self.issue(&user))
    }
}
