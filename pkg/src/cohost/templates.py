"""Fixed message catalog. Every outgoing text is built from these strings so
action logs stay byte-stable across runs."""

QUESTIONS = {
    1: "Have you felt able to express yourself, put forward your own ideas, and contradict others when necessary?",
    2: "Have you felt inhibited from participating in the discussion because of the behavior of other meeting members (other than the host)?",
    3: "Is there any feedback or advice you'd like me to anonymously pass on to the host?",
}

INTRO = (
    "Hello everyone, I'm the virtual co-host for this meeting. {host} is the host. "
    "I'll be observing conversational dynamics and may reach out to some of you privately later on."
)

ASK_PREAMBLE = "Quick private check-in from your virtual co-host. Please reply yes or no."

ACK = "Thanks, noted."

NOT_UNDERSTOOD_YES_NO = "Sorry, I didn't understand that. Please reply yes or no.\n{question}"
NOT_UNDERSTOOD_FEEDBACK = "Sorry, I didn't understand that. Type your feedback, or reply no.\n{question}"

CLOSE_ALL_CLEAR = "Thank you for your answers. Enjoy the rest of the meeting!"
CLOSE_WILL_INTERVENE = "Thank you for your answers. I will intervene to help improve the meeting."
CLOSE_FEEDBACK_SUFFIX = " I'll pass your feedback on to the host anonymously."

HOST_PROBLEM = {
    "expression": "A participant has told me they have not felt able to share their ideas freely in this meeting.",
    "inhibition": "A participant has told me the behavior of other members has held them back from joining the discussion.",
    "both": (
        "Participants have told me they have not felt able to share their ideas freely, "
        "and that the behavior of other members has held them back from joining the discussion."
    ),
}

HOST_SUGGESTIONS = (
    "Some ways to facilitate more inclusively:\n"
    "- Invite quieter members by name to share their view.\n"
    "- Go around the group before settling a decision.\n"
    "- Gently redirect when one person holds the floor for long stretches.\n"
    "The chart shows each member's speaking time so far; highlighted members are below average."
)

OVER_PARTICIPATOR = (
    "You have been speaking more than others in this meeting. Try to let others contribute more.\n"
    "Some ideas:\n"
    "- Pause after making a point and ask what others think.\n"
    "- Keep contributions short so more people get a turn.\n"
    "The chart compares your speaking time to the average of the other members."
)

STOP_HINT = "Reply stop if you no longer want these messages."

REFRESH_HOST = "Updated speaking time for each member."
REFRESH_OVER = "Updated view of your speaking time compared with the average of the other members."

FEEDBACK = "Anonymous feedback from a meeting member: {note}"

AVERAGE_LABEL = "average of others"


def host_message(reason: str) -> str:
    return f"{HOST_PROBLEM[reason]}\n{HOST_SUGGESTIONS}\n{STOP_HINT}"


def over_message() -> str:
    return f"{OVER_PARTICIPATOR}\n{STOP_HINT}"
