//! User accounts with Argon2id password hashes, optionally persisted to a
//! JSON file.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Mutex, OnceLock};

use argon2::password_hash::{PasswordHash, PasswordHasher, PasswordVerifier, SaltString};
use argon2::Argon2;
use password_hash::rand_core::OsRng;
use serde::{Deserialize, Serialize};

use crate::auth::AuthError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Annotator,
    Admin,
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "annotator" => Ok(Role::Annotator),
            "admin" => Ok(Role::Admin),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

/// An account as exposed outside this module: never carries the hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct User {
    pub username: String,
    pub role: Role,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Account {
    role: Role,
    password_hash: String,
}

pub const MIN_PASSWORD_CHARS: usize = 8;

pub struct Accounts {
    path: Option<PathBuf>,
    users: Mutex<BTreeMap<String, Account>>,
}

fn hash(password: &str) -> Result<String, AuthError> {
    let salt = SaltString::generate(&mut OsRng);
    Argon2::default()
        .hash_password(password.as_bytes(), &salt)
        .map(|h| h.to_string())
        .map_err(|e| AuthError::Storage(e.to_string()))
}

fn verify(password: &str, stored: &str) -> bool {
    PasswordHash::new(stored)
        .map(|h| Argon2::default().verify_password(password.as_bytes(), &h).is_ok())
        .unwrap_or(false)
}

/// Hash checked against when the username is unknown, so that both failure
/// paths cost the same.
fn dummy_hash() -> &'static str {
    static DUMMY: OnceLock<String> = OnceLock::new();
    DUMMY.get_or_init(|| hash("no such user, no such password").expect("hashing a constant"))
}

fn check_password(password: &str) -> Result<(), AuthError> {
    if password.chars().count() < MIN_PASSWORD_CHARS {
        return Err(AuthError::WeakPassword(MIN_PASSWORD_CHARS));
    }
    Ok(())
}

impl Accounts {
    pub fn in_memory() -> Self {
        Accounts {
            path: None,
            users: Mutex::new(BTreeMap::new()),
        }
    }

    /// Loads `path` if it exists; later changes are written back to it.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, AuthError> {
        let path = path.into();
        let users = match std::fs::read_to_string(&path) {
            Ok(raw) => serde_json::from_str(&raw).map_err(|e| AuthError::Storage(e.to_string()))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(AuthError::Storage(e.to_string())),
        };
        Ok(Accounts {
            path: Some(path),
            users: Mutex::new(users),
        })
    }

    fn persist(&self, users: &BTreeMap<String, Account>) -> Result<(), AuthError> {
        let Some(path) = &self.path else { return Ok(()) };
        let storage = |e: std::io::Error| AuthError::Storage(e.to_string());
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(std::path::Path::new("."));
        std::fs::create_dir_all(dir).map_err(storage)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(storage)?;
        serde_json::to_writer_pretty(&mut tmp, users).map_err(|e| AuthError::Storage(e.to_string()))?;
        tmp.persist(path).map_err(|e| AuthError::Storage(e.to_string()))?;
        Ok(())
    }

    pub fn add_user(&self, username: &str, password: &str, role: Role) -> Result<User, AuthError> {
        if username.trim().is_empty() || username != username.trim() {
            return Err(AuthError::InvalidUsername(username.to_string()));
        }
        check_password(password)?;
        let password_hash = hash(password)?;
        let mut users = self.users.lock().unwrap();
        if users.contains_key(username) {
            return Err(AuthError::DuplicateUser(username.to_string()));
        }
        users.insert(username.to_string(), Account { role, password_hash });
        self.persist(&users)?;
        Ok(User {
            username: username.to_string(),
            role,
        })
    }

    /// Checks a username and password. Unknown users and wrong passwords
    /// fail identically.
    pub fn verify(&self, username: &str, password: &str) -> Result<User, AuthError> {
        let account = self.users.lock().unwrap().get(username).cloned();
        match account {
            Some(a) if verify(password, &a.password_hash) => Ok(User {
                username: username.to_string(),
                role: a.role,
            }),
            Some(_) => Err(AuthError::InvalidCredentials),
            None => {
                verify(password, dummy_hash());
                Err(AuthError::InvalidCredentials)
            }
        }
    }

    pub fn change_password(&self, username: &str, old: &str, new: &str) -> Result<(), AuthError> {
        self.verify(username, old)?;
        check_password(new)?;
        let password_hash = hash(new)?;
        let mut users = self.users.lock().unwrap();
        let account = users.get_mut(username).ok_or(AuthError::InvalidCredentials)?;
        account.password_hash = password_hash;
        self.persist(&users)
    }

    pub fn get(&self, username: &str) -> Option<User> {
        self.users.lock().unwrap().get(username).map(|a| User {
            username: username.to_string(),
            role: a.role,
        })
    }

    pub fn list(&self) -> Vec<User> {
        self.users
            .lock()
            .unwrap()
            .iter()
            .map(|(name, a)| User {
                username: name.clone(),
                role: a.role,
            })
            .collect()
    }
}
