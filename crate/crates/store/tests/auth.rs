use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use kwicdesk_store::{Accounts, AuthError, Clock, Role, TokenService, DEFAULT_TOKEN_LIFETIME};

struct FixedClock(AtomicU64);

impl Clock for FixedClock {
    fn now(&self) -> u64 {
        self.0.load(Ordering::SeqCst)
    }
}

fn setup() -> (Accounts, TokenService, Arc<FixedClock>) {
    let accounts = Accounts::in_memory();
    accounts.add_user("curatrice", "correct horse", Role::Annotator).unwrap();
    let clock = Arc::new(FixedClock(AtomicU64::new(1_700_000_000)));
    let tokens = TokenService::new(b"test-signing-key", DEFAULT_TOKEN_LIFETIME, clock.clone());
    (accounts, tokens, clock)
}

#[test]
fn sign_then_verify() {
    let (accounts, tokens, _) = setup();
    let token = tokens.authenticate(&accounts, "curatrice", "correct horse").unwrap();
    let claims = tokens.verify(&token).unwrap();
    assert_eq!(claims.sub, "curatrice");
    assert_eq!(claims.role, Role::Annotator);
    assert_eq!(claims.exp - claims.iat, 12 * 3600);
}

#[test]
fn wrong_user_and_wrong_password_look_the_same() {
    let (accounts, tokens, _) = setup();
    let a = tokens.authenticate(&accounts, "curatrice", "wrong horse").unwrap_err();
    let b = tokens.authenticate(&accounts, "nessuno", "correct horse").unwrap_err();
    assert_eq!(a, AuthError::InvalidCredentials);
    assert_eq!(a, b);
    assert_eq!(a.to_string(), b.to_string());
}

#[test]
fn expiry_follows_the_clock() {
    let (accounts, tokens, clock) = setup();
    let token = tokens.authenticate(&accounts, "curatrice", "correct horse").unwrap();
    clock.0.fetch_add(12 * 3600 - 1, Ordering::SeqCst);
    assert!(tokens.verify(&token).is_ok());
    clock.0.fetch_add(1, Ordering::SeqCst);
    assert_eq!(tokens.verify(&token), Err(AuthError::TokenExpired));
}

#[test]
fn tampered_or_foreign_tokens_are_rejected() {
    let (accounts, tokens, clock) = setup();
    let token = tokens.authenticate(&accounts, "curatrice", "correct horse").unwrap();
    let other = TokenService::new(b"another-key", Duration::from_secs(60), clock);
    assert_eq!(other.verify(&token), Err(AuthError::InvalidToken));
    let mut bytes = token.into_bytes();
    let last = bytes.len() - 3;
    bytes[last] = if bytes[last] == b'A' { b'B' } else { b'A' };
    assert_eq!(tokens.verify(&String::from_utf8(bytes).unwrap()), Err(AuthError::InvalidToken));
    assert_eq!(tokens.verify("not.a.token"), Err(AuthError::InvalidToken));
}

#[test]
fn change_password() {
    let (accounts, tokens, _) = setup();
    assert_eq!(
        accounts.change_password("curatrice", "bad guess", "new password"),
        Err(AuthError::InvalidCredentials)
    );
    assert_eq!(
        accounts.change_password("curatrice", "correct horse", "short"),
        Err(AuthError::WeakPassword(8))
    );
    accounts.change_password("curatrice", "correct horse", "battery staple").unwrap();
    assert!(tokens.authenticate(&accounts, "curatrice", "correct horse").is_err());
    assert!(tokens.authenticate(&accounts, "curatrice", "battery staple").is_ok());
}

#[test]
fn accounts_persist_without_plaintext() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("users.json");
    let accounts = Accounts::open(&path).unwrap();
    accounts.add_user("admin", "s3cret-pass", Role::Admin).unwrap();
    assert_eq!(
        accounts.add_user("admin", "other-pass", Role::Admin),
        Err(AuthError::DuplicateUser("admin".into()))
    );
    let raw = std::fs::read_to_string(&path).unwrap();
    assert!(!raw.contains("s3cret-pass"));
    assert!(raw.contains("$argon2id$"));
    let reopened = Accounts::open(&path).unwrap();
    assert_eq!(reopened.verify("admin", "s3cret-pass").unwrap().role, Role::Admin);
}
