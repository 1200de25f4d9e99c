//! Certificates: a human-readable transcript with an embedded
//! machine-readable JSON block. Output is a pure function of the command and
//! the input bytes, so reruns are byte-identical and golden-file tests are
//! cheap.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExitStatus {
    Pass,
    VerificationFail,
    InputError,
}

impl ExitStatus {
    pub fn code(&self) -> i32 {
        match self {
            ExitStatus::Pass => 0,
            ExitStatus::VerificationFail => 1,
            ExitStatus::InputError => 2,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            ExitStatus::Pass => "PASS",
            ExitStatus::VerificationFail => "VERIFICATION-FAIL",
            ExitStatus::InputError => "INPUT-ERROR",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Claim {
    pub claim: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug)]
pub struct Certificate {
    pub command: String,
    pub argv: Vec<String>,
    pub inputs: BTreeMap<String, String>,
    pub result: Value,
    pub verified_claims: Vec<Claim>,
    pub exit_status: ExitStatus,
}

impl Certificate {
    pub fn new(command: &str, argv: Vec<String>) -> Self {
        Certificate {
            command: command.to_string(),
            argv,
            inputs: BTreeMap::new(),
            result: Value::Null,
            verified_claims: Vec::new(),
            exit_status: ExitStatus::Pass,
        }
    }

    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        let digest = hasher.finalize();
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.insert(path.display().to_string(), hex);
    }

    pub fn claim(&mut self, claim: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.verified_claims.push(Claim { claim: claim.into(), pass, detail: detail.into() });
    }

    /// Pass only when every verified claim succeeded.
    pub fn finalize(&mut self) {
        if self.exit_status == ExitStatus::InputError {
            return;
        }
        self.exit_status = if self.verified_claims.iter().all(|c| c.pass)
            && !self.verified_claims.is_empty()
        {
            ExitStatus::Pass
        } else {
            ExitStatus::VerificationFail
        };
    }

    pub fn input_error(&mut self, detail: impl Into<String>) {
        let detail = detail.into();
        self.verified_claims.push(Claim {
            claim: "inputs are well-formed".into(),
            pass: false,
            detail,
        });
        self.exit_status = ExitStatus::InputError;
    }

    fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "argv": self.argv,
            "inputs": self.inputs,
            "result": self.result,
            "verified_claims": self.verified_claims.iter().map(|c| json!({
                "claim": c.claim,
                "pass": c.pass,
                "detail": c.detail,
            })).collect::<Vec<Value>>(),
            "exit_status": match self.exit_status {
                ExitStatus::Pass => "pass",
                ExitStatus::VerificationFail => "verification_fail",
                ExitStatus::InputError => "input_error",
            },
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("infmat certificate v1\n");
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("args: {}\n", self.argv.join(" ")));
        for (path, digest) in &self.inputs {
            out.push_str(&format!("input {path} sha256 {digest}\n"));
        }
        for c in &self.verified_claims {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("claim: {} ... {mark} ({})\n", c.claim, c.detail));
        }
        out.push_str(&format!("result: {}\n", self.exit_status.label()));
        out.push_str("---BEGIN CERTIFICATE JSON---\n");
        out.push_str(
            &serde_json::to_string_pretty(&self.to_json()).expect("certificate serializes"),
        );
        out.push_str("\n---END CERTIFICATE JSON---\n");
        out
    }

    /// Print to stdout and, when requested, write atomically (temp file in
    /// the target directory, then rename) so failures never leave partial
    /// output behind.
    pub fn emit(&self, out_path: Option<&Path>) -> std::io::Result<()> {
        let text = self.render();
        print!("{text}");
        if let Some(path) = out_path {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = dir.to_path_buf();
            let stem = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "certificate".into());
            tmp.push(format!(".{stem}.tmp"));
            {
                let mut f = fs::File::create(&tmp)?;
                f.write_all(text.as_bytes())?;
                f.sync_all()?;
            }
            fs::rename(&tmp, path)?;
        }
        Ok(())
    }
}
